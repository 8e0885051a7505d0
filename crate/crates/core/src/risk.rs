//! Builders for set-valued risk measure problems on one-period scenario
//! markets: average value at risk and the relaxed worst case, both with
//! proportional transaction costs.
//!
//! Assets trade against cash (asset 1) at bid/ask prices. A position is
//! solvent when it can be exchanged into the nonnegative orthant, so the
//! solvency cone is generated by the exchange vectors `pi e_i - e_j`. Risk
//! values live in the eligible subspace spanned by the first `m`
//! coordinates and are ordered by the eligible part of the time-0 solvency
//! cone.

use crate::polyhedron::{minimize_vrep, VRep};
use crate::problem::{ConstraintSystem, MolpProblem, OrderingCone, ProblemError, GEOM_TOL};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("invalid market data: {0}")]
    InvalidMarket(String),
    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),
    #[error("no interior normalization point: {0}")]
    NoInteriorC(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<ProblemError> for RiskError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::InvalidC(msg) => RiskError::NoInteriorC(msg),
            other => RiskError::NoInteriorC(other.to_string()),
        }
    }
}

/// One-period market on `d` assets and `num_scenarios` states, with bid and
/// ask prices quoted in units of asset 1 (cash). The first `m` assets are
/// eligible to cover risk.
#[derive(Debug, Clone)]
pub struct ScenarioMarket {
    pub d: usize,
    pub num_scenarios: usize,
    pub m: usize,
    pub probs: Vec<f64>,
    pub bid0: Vec<f64>,
    pub ask0: Vec<f64>,
    /// Per-scenario time-T bid prices, one row per scenario.
    pub bid_t: Vec<Vec<f64>>,
    pub ask_t: Vec<Vec<f64>>,
    /// Time-0 base prices when the market was given as prices plus
    /// proportional costs; needed to widen costs for the worst-case cone.
    pub base0: Option<(Vec<f64>, Vec<f64>)>,
}

/// Portfolio payoff per scenario, one row of `d` asset positions per
/// scenario.
#[derive(Debug, Clone)]
pub struct Payoff {
    pub rows: Vec<Vec<f64>>,
}

impl Payoff {
    /// The stacked vector (scenario-major, assets within).
    pub fn stacked(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }
}

impl ScenarioMarket {
    pub fn validate(&self) -> Result<(), RiskError> {
        if self.m == 0 || self.m > self.d {
            return Err(RiskError::InvalidMarket(format!(
                "eligible asset count {} out of range 1..={}",
                self.m, self.d
            )));
        }
        if self.probs.len() != self.num_scenarios {
            return Err(RiskError::InvalidMarket("probability count".into()));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(RiskError::InvalidMarket(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if self.probs.iter().any(|p| *p <= 0.0) {
            return Err(RiskError::InvalidMarket(
                "probabilities must be positive".into(),
            ));
        }
        let check_pair = |bid: &[f64], ask: &[f64], what: &str| {
            if bid.len() != self.d || ask.len() != self.d {
                return Err(RiskError::InvalidMarket(format!("{what} price length")));
            }
            for (b, a) in bid.iter().zip(ask) {
                if !(*b > 0.0 && a >= b) {
                    return Err(RiskError::InvalidMarket(format!(
                        "{what} prices need 0 < bid <= ask"
                    )));
                }
            }
            Ok(())
        };
        check_pair(&self.bid0, &self.ask0, "time-0")?;
        if self.bid_t.len() != self.num_scenarios || self.ask_t.len() != self.num_scenarios {
            return Err(RiskError::InvalidMarket("scenario price row count".into()));
        }
        for (bid, ask) in self.bid_t.iter().zip(&self.ask_t) {
            check_pair(bid, ask, "time-T")?;
        }
        Ok(())
    }
}

/// Exchange generators of the solvency cone for one price system: for every
/// ordered asset pair (i, j), surrendering `pi_ij = ask_j / bid_i` units of
/// i buys one unit of j (through cash when neither side is cash). When
/// every round trip is costless those pair vectors span no disposals, so
/// the unit vectors are appended to keep the nonnegative orthant inside.
pub fn solvency_generators(bid: &[f64], ask: &[f64]) -> Vec<Vec<f64>> {
    let d = bid.len();
    let mut generators = Vec::with_capacity(d * d.saturating_sub(1));
    let mut all_costless = true;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let pi = ask[j] / bid[i];
            let mut g = vec![0.0; d];
            g[i] = pi;
            g[j] = -1.0;
            generators.push(g);
            let round_trip = pi * (ask[i] / bid[j]);
            if round_trip > 1.0 + 1e-12 {
                all_costless = false;
            }
        }
    }
    if all_costless {
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            generators.push(e);
        }
    }
    generators
}

fn prune_generators(generators: Vec<Vec<f64>>, dim: usize) -> Vec<Vec<f64>> {
    let v = VRep {
        dim,
        points: vec![vec![0.0; dim]],
        rays: generators,
    };
    minimize_vrep(&v, GEOM_TOL).rays
}

/// A risk MOLP together with the bookkeeping needed to read its outcome
/// space: which original eligible asset each outcome coordinate refers to,
/// and the cone column counts.
#[derive(Debug)]
pub struct RiskProblem {
    pub problem: MolpProblem,
    /// outcome coordinate k of the problem is asset `outcome_to_asset[k]`
    /// (0-based) of the market.
    pub outcome_to_asset: Vec<usize>,
    pub num_time0_generators: usize,
    pub num_scenario_generators: usize,
    pub num_wc_generators: usize,
}

/// Ordering cone of the eligible subspace: the solvency cone of the
/// sub-market on the eligible assets. Routes through ineligible assets
/// surrender at least as much as direct ones, so the section loses
/// nothing. The normalization point is the generator mean; when its last
/// coordinate is too small the outcome coordinates are permuted to end on
/// a positive one.
fn eligible_cone(market: &ScenarioMarket) -> Result<(OrderingCone, Vec<usize>), RiskError> {
    let m = market.m;
    let generators = solvency_generators(&market.bid0[..m], &market.ask0[..m]);
    let mut mean = vec![0.0; m];
    for g in &generators {
        for (s, v) in mean.iter_mut().zip(g) {
            *s += v / generators.len() as f64;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    if mean[m - 1] <= GEOM_TOL {
        let best = (0..m)
            .max_by(|&a, &b| mean[a].partial_cmp(&mean[b]).unwrap())
            .unwrap();
        if mean[best] <= GEOM_TOL {
            return Err(RiskError::NoInteriorC(
                "generator mean has no positive coordinate".into(),
            ));
        }
        order.swap(best, m - 1);
    }
    let permuted: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| order.iter().map(|&k| g[k]).collect())
        .collect();
    let c: Vec<f64> = order.iter().map(|&k| mean[k] / mean[order[m - 1]]).collect();
    let cone = OrderingCone::from_generators(permuted, Some(c), GEOM_TOL)?;
    Ok((cone, order))
}

fn check_payoff(market: &ScenarioMarket, payoff: &Payoff) -> Result<(), RiskError> {
    if payoff.rows.len() != market.num_scenarios
        || payoff.rows.iter().any(|r| r.len() != market.d)
    {
        return Err(RiskError::InvalidMarket(
            "payoff shape does not match the market".into(),
        ));
    }
    Ok(())
}

/// Average value at risk of a payoff, as a MOLP over the eligible assets.
///
/// Decision variables are the nonnegative scenario slack positions, the
/// eligible deposit, and conic coefficients of the time-0 cone and of each
/// scenario's time-T cone; one equality row per scenario and asset balances
/// them against the payoff, and outcomes average the slacks at level alpha
/// minus the deposit. Ineligible outcome coordinates are forced to zero by
/// extra rows.
pub fn build_avar(
    market: &ScenarioMarket,
    payoff: &Payoff,
    alpha: &[f64],
    minimal_cone: bool,
) -> Result<RiskProblem, RiskError> {
    market.validate()?;
    check_payoff(market, payoff)?;
    let d = market.d;
    let n_sc = market.num_scenarios;
    let m = market.m;
    if alpha.len() != d || alpha.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
        return Err(RiskError::InvalidAlpha(
            "alpha must lie in (0, 1] for every asset".into(),
        ));
    }

    let mut k0 = solvency_generators(&market.bid0, &market.ask0);
    if minimal_cone {
        k0 = prune_generators(k0, d);
    }
    let kt: Vec<Vec<Vec<f64>>> = (0..n_sc)
        .map(|s| {
            let mut g = solvency_generators(&market.bid_t[s], &market.ask_t[s]);
            if minimal_cone {
                g = prune_generators(g, d);
            }
            g
        })
        .collect();
    let i_count = k0.len();
    let j_count: usize = kt.iter().map(|g| g.len()).sum();

    // Columns: Z-hat (d*n_sc) | z (d) | r (i_count) | s (j_count).
    let zhat0 = 0;
    let z0 = d * n_sc;
    let r0 = z0 + d;
    let s0 = r0 + i_count;
    let num_vars = s0 + j_count;

    // Rows: one balance per scenario and asset, then one zero row per
    // ineligible outcome coordinate.
    let num_rows = d * n_sc + (d - m);
    let mut cs = ConstraintSystem::free(num_rows, num_vars);
    for v in 0..d * n_sc {
        cs.var_lower[zhat0 + v] = 0.0;
    }
    for v in r0..num_vars {
        cs.var_lower[v] = 0.0;
    }

    let xhat = payoff.stacked();
    let mut s_col = s0;
    for sc in 0..n_sc {
        let row0 = d * sc;
        for i in 0..d {
            cs.entries.push((row0 + i, zhat0 + row0 + i, 1.0));
            cs.entries.push((row0 + i, z0 + i, -1.0));
            cs.row_lower[row0 + i] = -xhat[row0 + i];
            cs.row_upper[row0 + i] = -xhat[row0 + i];
        }
        for (k, g) in k0.iter().enumerate() {
            for (i, v) in g.iter().enumerate() {
                if *v != 0.0 {
                    cs.entries.push((row0 + i, r0 + k, -v));
                }
            }
        }
        for g in &kt[sc] {
            for (i, v) in g.iter().enumerate() {
                if *v != 0.0 {
                    cs.entries.push((row0 + i, s_col, -v));
                }
            }
            s_col += 1;
        }
    }
    for i in m..d {
        let row = d * n_sc + (i - m);
        for sc in 0..n_sc {
            cs.entries.push((row, zhat0 + d * sc + i, market.probs[sc] / alpha[i]));
        }
        cs.entries.push((row, z0 + i, -1.0));
        cs.row_lower[row] = 0.0;
        cs.row_upper[row] = 0.0;
    }

    let (cone, order) = eligible_cone(market)?;
    let mut objective_entries = Vec::new();
    for (k, &asset) in order.iter().enumerate() {
        for sc in 0..n_sc {
            objective_entries.push((k, zhat0 + d * sc + asset, market.probs[sc] / alpha[asset]));
        }
        objective_entries.push((k, z0 + asset, -1.0));
    }

    let problem = MolpProblem {
        num_objectives: m,
        constraints: cs,
        objective_entries,
        cone,
    };
    Ok(RiskProblem {
        problem,
        outcome_to_asset: order,
        num_time0_generators: i_count,
        num_scenario_generators: j_count,
        num_wc_generators: 0,
    })
}

/// Relaxed worst case of a payoff: per scenario the covered position must
/// sit within eps of the nonnegative orthant and inside the widened
/// solvency cone built from the worst-case costs.
pub fn build_rwc(
    market: &ScenarioMarket,
    payoff: &Payoff,
    eps_vec: &[f64],
    wc_lambda: &[f64],
    minimal_cone: bool,
) -> Result<RiskProblem, RiskError> {
    market.validate()?;
    check_payoff(market, payoff)?;
    let d = market.d;
    let n_sc = market.num_scenarios;
    let m = market.m;
    if eps_vec.len() != d || eps_vec.iter().any(|e| *e < 0.0) {
        return Err(RiskError::InvalidMarket(
            "relaxation eps must be nonnegative per asset".into(),
        ));
    }
    let (base, lambda) = market.base0.as_ref().ok_or_else(|| {
        RiskError::InvalidMarket(
            "worst-case cone needs base prices and proportional costs".into(),
        )
    })?;
    if wc_lambda.len() != d || wc_lambda.iter().zip(lambda).any(|(wc, l)| wc < l) {
        return Err(RiskError::InvalidMarket(
            "worst-case costs must dominate the market costs".into(),
        ));
    }
    let bid_wc: Vec<f64> = base.iter().zip(wc_lambda).map(|(s, l)| (1.0 - l) * s).collect();
    let ask_wc: Vec<f64> = base.iter().zip(wc_lambda).map(|(s, l)| (1.0 + l) * s).collect();
    if bid_wc.iter().any(|b| *b <= 0.0) {
        return Err(RiskError::InvalidMarket(
            "worst-case costs of 100% or more leave no bid price".into(),
        ));
    }

    let mut k0 = solvency_generators(&market.bid0, &market.ask0);
    let mut g_cone = solvency_generators(&bid_wc, &ask_wc);
    if minimal_cone {
        k0 = prune_generators(k0, d);
        g_cone = prune_generators(g_cone, d);
    }
    let kt: Vec<Vec<Vec<f64>>> = (0..n_sc)
        .map(|s| {
            let mut g = solvency_generators(&market.bid_t[s], &market.ask_t[s]);
            if minimal_cone {
                g = prune_generators(g, d);
            }
            g
        })
        .collect();
    let i_count = k0.len();
    let j_count: usize = kt.iter().map(|g| g.len()).sum();
    let l_count = g_cone.len();

    // Columns: z (m) | gamma (l_count*n_sc) | r (i_count) | s (j_count).
    let z0 = 0;
    let g0 = m;
    let r0 = g0 + l_count * n_sc;
    let s0 = r0 + i_count;
    let num_vars = s0 + j_count;

    // Rows: per scenario and asset, the covered position stays above -eps
    // (first block) and equals a combination of the widened cone (second
    // block).
    let num_rows = 2 * d * n_sc;
    let mut cs = ConstraintSystem::free(num_rows, num_vars);
    for v in g0..num_vars {
        cs.var_lower[v] = 0.0;
    }

    let xhat = payoff.stacked();
    let fill = |cs: &mut ConstraintSystem, block: usize, with_gamma: bool| {
        let mut s_col = s0;
        for sc in 0..n_sc {
            let row0 = block * d * n_sc + d * sc;
            for i in 0..m {
                cs.entries.push((row0 + i, z0 + i, 1.0));
            }
            for (k, g) in k0.iter().enumerate() {
                for (i, v) in g.iter().enumerate() {
                    if *v != 0.0 {
                        cs.entries.push((row0 + i, r0 + k, -v));
                    }
                }
            }
            for g in &kt[sc] {
                for (i, v) in g.iter().enumerate() {
                    if *v != 0.0 {
                        cs.entries.push((row0 + i, s_col, -v));
                    }
                }
                s_col += 1;
            }
            if with_gamma {
                for (k, g) in g_cone.iter().enumerate() {
                    for (i, v) in g.iter().enumerate() {
                        if *v != 0.0 {
                            cs.entries.push((row0 + i, g0 + l_count * sc + k, -v));
                        }
                    }
                }
            }
        }
    };
    fill(&mut cs, 0, false);
    fill(&mut cs, 1, true);
    for sc in 0..n_sc {
        for i in 0..d {
            let row_ge = d * sc + i;
            cs.row_lower[row_ge] = -xhat[row_ge] - eps_vec[i];
            let row_eq = d * n_sc + d * sc + i;
            cs.row_lower[row_eq] = -xhat[d * sc + i];
            cs.row_upper[row_eq] = -xhat[d * sc + i];
        }
    }

    let (cone, order) = eligible_cone(market)?;
    let objective_entries: Vec<(usize, usize, f64)> = order
        .iter()
        .enumerate()
        .map(|(k, &asset)| (k, z0 + asset, 1.0))
        .collect();

    let problem = MolpProblem {
        num_objectives: m,
        constraints: cs,
        objective_entries,
        cone,
    };
    Ok(RiskProblem {
        problem,
        outcome_to_asset: order,
        num_time0_generators: i_count,
        num_scenario_generators: j_count,
        num_wc_generators: l_count,
    })
}

/// One-asset average value at risk by its plain scalar program:
/// min over t of t + E[max(-x - t, 0)] / alpha.
pub fn scalar_avar_oracle(probs: &[f64], payoff: &[f64], alpha: f64) -> f64 {
    use crate::lp::{blank_lp, solve_lp, LpTolerances, Sense};
    let n = probs.len();
    // Columns: t (free) then one excess-loss slack per scenario.
    let mut lp = blank_lp(Sense::Minimize, n, n + 1);
    lp.objective[0] = 1.0;
    for sc in 0..n {
        lp.objective[1 + sc] = probs[sc] / alpha;
        lp.col_lower[1 + sc] = 0.0;
        lp.entries.push((sc, 0, 1.0));
        lp.entries.push((sc, 1 + sc, 1.0));
        lp.row_lower[sc] = -payoff[sc];
    }
    lp.col_lower[0] = f64::NEG_INFINITY;
    let r = solve_lp(&lp, None, LpTolerances::default()).expect("scalar program solves");
    r.objective
}

/// Everything a market file can carry: the market itself, the payoff, and
/// optional risk parameters.
#[derive(Debug)]
pub struct MarketFile {
    pub market: ScenarioMarket,
    pub payoff: Payoff,
    pub alpha: Option<Vec<f64>>,
    pub rwc_eps: Option<Vec<f64>>,
    pub rwc_lambda: Option<Vec<f64>>,
}

/// Parses the line-oriented market format.
///
/// ```text
/// market d N m            header
/// prob n p                scenario probability
/// s0 <d floats>           time-0 base prices (with `lambda`)
/// lambda <d floats>       proportional costs applied to s0 and sT
/// sT n <d floats>         scenario-n time-T base prices
/// bid0/ask0 <d floats>    explicit time-0 prices
/// bidT/askT n <d floats>  explicit scenario prices
/// payoff n <d floats>     payoff row X(omega_n)
/// alpha <d floats>        average value at risk levels
/// rwc_eps <d floats>      relaxation amounts
/// rwc_lambda <d floats>   worst-case proportional costs
/// ```
pub fn parse_market(text: &str) -> Result<MarketFile, RiskError> {
    let err = |line: usize, msg: String| RiskError::Parse { line, msg };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut probs: Vec<Option<f64>> = Vec::new();
    let mut s0: Option<Vec<f64>> = None;
    let mut lambda: Option<Vec<f64>> = None;
    let mut s_t: Vec<Option<Vec<f64>>> = Vec::new();
    let mut bid0: Option<Vec<f64>> = None;
    let mut ask0: Option<Vec<f64>> = None;
    let mut bid_t: Vec<Option<Vec<f64>>> = Vec::new();
    let mut ask_t: Vec<Option<Vec<f64>>> = Vec::new();
    let mut payoff: Vec<Option<Vec<f64>>> = Vec::new();
    let mut alpha: Option<Vec<f64>> = None;
    let mut rwc_eps: Option<Vec<f64>> = None;
    let mut rwc_lambda: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if header.is_none() {
            if tokens[0] != "market" || tokens.len() != 4 {
                return Err(err(line, "expected header `market d N m`".into()));
            }
            let parse = |t: &str| -> Result<usize, RiskError> {
                t.parse().map_err(|_| err(line, format!("bad count `{t}`")))
            };
            let d = parse(tokens[1])?;
            let n = parse(tokens[2])?;
            let m = parse(tokens[3])?;
            if d == 0 || n == 0 {
                return Err(err(line, "need at least one asset and scenario".into()));
            }
            probs = vec![None; n];
            s_t = vec![None; n];
            bid_t = vec![None; n];
            ask_t = vec![None; n];
            payoff = vec![None; n];
            header = Some((d, n, m));
            continue;
        }
        let (d, n, _) = header.unwrap();
        let floats = |tokens: &[&str], want: usize| -> Result<Vec<f64>, RiskError> {
            if tokens.len() != want {
                return Err(err(line, format!("expected {want} numbers")));
            }
            tokens
                .iter()
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| !v.is_nan())
                        .ok_or_else(|| err(line, format!("bad number `{t}`")))
                })
                .collect()
        };
        let scenario = |t: &str| -> Result<usize, RiskError> {
            let s: usize = t
                .parse()
                .map_err(|_| err(line, format!("bad scenario index `{t}`")))?;
            if s == 0 || s > n {
                return Err(err(line, format!("scenario {s} out of range 1..={n}")));
            }
            Ok(s - 1)
        };
        match tokens[0] {
            "prob" => {
                if tokens.len() != 3 {
                    return Err(err(line, "expected `prob n p`".into()));
                }
                let sc = scenario(tokens[1])?;
                probs[sc] = Some(floats(&tokens[2..], 1)?[0]);
            }
            "s0" => s0 = Some(floats(&tokens[1..], d)?),
            "lambda" => lambda = Some(floats(&tokens[1..], d)?),
            "sT" => {
                let sc = scenario(tokens[1])?;
                s_t[sc] = Some(floats(&tokens[2..], d)?);
            }
            "bid0" => bid0 = Some(floats(&tokens[1..], d)?),
            "ask0" => ask0 = Some(floats(&tokens[1..], d)?),
            "bidT" => {
                let sc = scenario(tokens[1])?;
                bid_t[sc] = Some(floats(&tokens[2..], d)?);
            }
            "askT" => {
                let sc = scenario(tokens[1])?;
                ask_t[sc] = Some(floats(&tokens[2..], d)?);
            }
            "payoff" => {
                let sc = scenario(tokens[1])?;
                payoff[sc] = Some(floats(&tokens[2..], d)?);
            }
            "alpha" => alpha = Some(floats(&tokens[1..], d)?),
            "rwc_eps" => rwc_eps = Some(floats(&tokens[1..], d)?),
            "rwc_lambda" => rwc_lambda = Some(floats(&tokens[1..], d)?),
            other => return Err(err(line, format!("unknown record `{other}`"))),
        }
    }

    let last = text.lines().count().max(1);
    let (d, n, m) = header.ok_or_else(|| err(last, "missing `market` header".into()))?;
    let all = |v: Vec<Option<f64>>, what: &str| -> Result<Vec<f64>, RiskError> {
        v.into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| err(last, format!("missing {what} for scenario {}", i + 1))))
            .collect()
    };
    let all_rows = |v: Vec<Option<Vec<f64>>>, what: &str| -> Result<Vec<Vec<f64>>, RiskError> {
        v.into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| err(last, format!("missing {what} for scenario {}", i + 1))))
            .collect()
    };

    let spread = |base: &[f64], lambda: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let bid = base.iter().zip(lambda).map(|(s, l)| (1.0 - l) * s).collect();
        let ask = base.iter().zip(lambda).map(|(s, l)| (1.0 + l) * s).collect();
        (bid, ask)
    };

    let mut base0 = None;
    let (bid0, ask0) = match (bid0, ask0) {
        (Some(b), Some(a)) => (b, a),
        (None, None) => {
            let s = s0.ok_or_else(|| err(last, "need `s0`+`lambda` or `bid0`+`ask0`".into()))?;
            let l = lambda
                .clone()
                .ok_or_else(|| err(last, "`s0` given without `lambda`".into()))?;
            let pair = spread(&s, &l);
            base0 = Some((s, l));
            pair
        }
        _ => return Err(err(last, "give both `bid0` and `ask0` or neither".into())),
    };
    let explicit_t = bid_t.iter().any(|r| r.is_some()) || ask_t.iter().any(|r| r.is_some());
    let (bid_t, ask_t) = if explicit_t {
        (
            all_rows(bid_t, "`bidT`")?,
            all_rows(ask_t, "`askT`")?,
        )
    } else {
        let l = lambda.ok_or_else(|| err(last, "scenario prices need `sT`+`lambda` or `bidT`+`askT`".into()))?;
        let rows = all_rows(s_t, "`sT`")?;
        let mut bids = Vec::with_capacity(n);
        let mut asks = Vec::with_capacity(n);
        for row in rows {
            let (b, a) = spread(&row, &l);
            bids.push(b);
            asks.push(a);
        }
        (bids, asks)
    };

    let market = ScenarioMarket {
        d,
        num_scenarios: n,
        m,
        probs: all(probs, "`prob`")?,
        bid0,
        ask0,
        bid_t,
        ask_t,
        base0,
    };
    market.validate()?;
    let payoff = Payoff {
        rows: all_rows(payoff, "`payoff`")?,
    };
    Ok(MarketFile {
        market,
        payoff,
        alpha,
        rwc_eps,
        rwc_lambda,
    })
}
