//! The explicit height-comparison pipeline: evaluable bound expressions,
//! the constant ledger, degree/height estimates for the curve and its
//! symmetric square inside the jacobian, the arithmetic Bézout bound with
//! its two error regimes, Mumford's repulsion principle, and the final
//! assembly of the quadratic-point height bound b(p).
//!
//! Everything is exact rational arithmetic. A factor log p is either kept
//! symbolic (in [`BoundExpr`]) or replaced by a directed rational
//! over-approximation; 64-bit floats appear only in report fields, always
//! next to an exact rational upper bound.

use crate::fiber;
use crate::rat::{self, binomial, ln_upper, q_int, qserde, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeightsError {
    #[error("gonality hypothesis requires p > 71, got p = {0}")]
    GonalityPrecondition(u64),
    #[error("dimension overflow: dV + dW = {dim} exceeds g = {genus}")]
    DimensionOverflow { dim: u64, genus: u64 },
    #[error("repulsion inversion needs genus >= 3, got g = {0}")]
    GenusDegenerate(u64),
    #[error("quotient dimension must be at least 2, got {0}")]
    DimATooSmall(u64),
    #[error("height comparison degenerates at p = 13")]
    PDegenerate,
    #[error("ledger parse error: {0}")]
    LedgerParse(String),
    #[error("unknown ledger constant: {0}")]
    UnknownConstant(String),
    #[error(transparent)]
    Fiber(#[from] fiber::FiberError),
}

/// A finite sum of terms c·p^a·(log p)^b with exact rational c and
/// nonnegative integer exponents, normalized to one term per (a, b).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundExpr {
    terms: BTreeMap<(u32, u32), Q>,
}

impl BoundExpr {
    pub fn zero() -> Self {
        BoundExpr::default()
    }

    pub fn term(c: Q, p_pow: u32, log_pow: u32) -> Self {
        let mut e = BoundExpr::default();
        e.add_term(c, p_pow, log_pow);
        e
    }

    pub fn add_term(&mut self, c: Q, p_pow: u32, log_pow: u32) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((p_pow, log_pow)).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(p_pow, log_pow));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    pub fn max_log_power(&self) -> u32 {
        self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    /// Exact rational upper bound at p, replacing log p by a directed
    /// rational bracket (upper for positive coefficients, lower for
    /// negative ones).
    pub fn eval_upper(&self, p: u64) -> Q {
        let needs_log = self.max_log_power() > 0;
        let (ln_lo, ln_hi) = if needs_log {
            (rat::ln_lower(p), rat::ln_upper(p))
        } else {
            (Q::zero(), Q::zero())
        };
        let pq = q_int(p as i64);
        let mut acc = Q::zero();
        for (&(a, b), c) in &self.terms {
            let ln = if c.is_negative() { &ln_lo } else { &ln_hi };
            let mut t = c * pq.pow(a as i32);
            for _ in 0..b {
                t *= ln;
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, p: u64) -> f64 {
        let lp = (p as f64).ln();
        self.terms
            .iter()
            .map(|(&(a, b), c)| rat::q_to_f64(c) * (p as f64).powi(a as i32) * lp.powi(b as i32))
            .sum()
    }
}

/// Provenance of a ledger constant: `Pinned` values come from a published
/// explicit bound; `Placeholder` slots default to 1 and are configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Pinned,
    Placeholder,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Pinned => write!(f, "pinned"),
            Provenance::Placeholder => write!(f, "placeholder"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub value: Q,
    pub provenance: Provenance,
}

/// Named positive constants filling every implicit-constant slot of the
/// bound pipeline. Only Bruin's three Green-function coefficients are
/// pinned; everything else defaults to 1 until sharper values exist.
#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    entries: BTreeMap<String, LedgerEntry>,
}

/// The full key set, with the Bruin sup-norm coefficients first.
pub const LEDGER_KEYS: &[&str] = &[
    "bruin_a",
    "bruin_b",
    "bruin_c",
    "c_mu",
    "a0_mu0",
    "a0_mue",
    "c_mumford",
    "c_bezout_err3",
    "c_bezout_err1",
    "gamma",
    "gamma1",
];

impl Default for Ledger {
    fn default() -> Self {
        let mut entries = BTreeMap::new();
        let pinned = [
            ("bruin_a", Q::new(BigInt::from(11), BigInt::from(125))),
            ("bruin_b", Q::new(BigInt::from(77), BigInt::from(10))),
            ("bruin_c", q_int(16000)),
        ];
        for (k, v) in pinned {
            entries.insert(
                k.to_string(),
                LedgerEntry {
                    value: v,
                    provenance: Provenance::Pinned,
                },
            );
        }
        for k in LEDGER_KEYS.iter().skip(3) {
            entries.insert(
                k.to_string(),
                LedgerEntry {
                    value: Q::one(),
                    provenance: Provenance::Placeholder,
                },
            );
        }
        Ledger { entries }
    }
}

impl Ledger {
    pub fn get(&self, key: &str) -> Result<&LedgerEntry, HeightsError> {
        self.entries
            .get(key)
            .ok_or_else(|| HeightsError::UnknownConstant(key.to_string()))
    }

    pub fn value(&self, key: &str) -> Result<Q, HeightsError> {
        Ok(self.get(key)?.value.clone())
    }

    /// Replace a constant's value, keeping its provenance tag.
    pub fn set(&mut self, key: &str, value: Q) -> Result<(), HeightsError> {
        if !value.is_positive() {
            return Err(HeightsError::LedgerParse(format!(
                "constant {key} must be positive"
            )));
        }
        let e = self
            .entries
            .get_mut(key)
            .ok_or_else(|| HeightsError::UnknownConstant(key.to_string()))?;
        e.value = value;
        Ok(())
    }

    pub fn placeholders(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, e)| e.provenance == Provenance::Placeholder)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &LedgerEntry)> {
        self.entries.iter()
    }

    /// Flat text format: each key/value line preceded by a mandatory
    /// `#provenance:` comment.
    ///
    /// ```text
    /// #provenance: pinned
    /// bruin_a = 11/125
    /// ```
    pub fn parse(text: &str) -> Result<Ledger, HeightsError> {
        let mut ledger = Ledger::default();
        let mut seen: BTreeMap<String, ()> = BTreeMap::new();
        let mut pending: Option<Provenance> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(tag) = rest.strip_prefix("provenance:") {
                    pending = Some(match tag.trim() {
                        "pinned" => Provenance::Pinned,
                        "placeholder" => Provenance::Placeholder,
                        other => {
                            return Err(HeightsError::LedgerParse(format!(
                                "line {}: unknown provenance tag {other:?}",
                                lineno + 1
                            )))
                        }
                    });
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(HeightsError::LedgerParse(format!(
                    "line {}: expected `key = num/den`",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let provenance = pending.take().ok_or_else(|| {
                HeightsError::LedgerParse(format!(
                    "line {}: key {key:?} lacks a #provenance: comment",
                    lineno + 1
                ))
            })?;
            if !LEDGER_KEYS.contains(&key) {
                return Err(HeightsError::UnknownConstant(key.to_string()));
            }
            if seen.insert(key.to_string(), ()).is_some() {
                return Err(HeightsError::LedgerParse(format!(
                    "line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
            let q = rat::parse_q(value).map_err(HeightsError::LedgerParse)?;
            if !q.is_positive() {
                return Err(HeightsError::LedgerParse(format!(
                    "line {}: constant {key:?} must be positive",
                    lineno + 1
                )));
            }
            ledger
                .entries
                .insert(key.to_string(), LedgerEntry { value: q, provenance });
        }
        Ok(ledger)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Ledger, HeightsError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HeightsError::LedgerParse(format!("{}: {e}", path.display())))?;
        Ledger::parse(&text)
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (k, e) in &self.entries {
            out.push_str(&format!("#provenance: {}\n", e.provenance));
            out.push_str(&format!("{} = {}\n", k, rat::format_q(&e.value)));
        }
        out
    }
}

/// N₀ = num((p−1)/12), the component-group order driving the projective
/// model exponent. Callers enforce p > 17; smaller inputs are accepted for
/// direct inspection.
pub fn n0(p: u64) -> u64 {
    let q = Q::new(BigInt::from(p - 1), BigInt::from(12u32));
    q.numer().to_u64().expect("numerator fits in u64")
}

/// Explicit sup-norm bound for the Green functions: a·p² + b·p + c with
/// Bruin's pinned coefficients (0.088, 7.7, 1.6·10⁴).
pub fn bruin_sup(p: u64, ledger: &Ledger) -> Result<Q, HeightsError> {
    let pq = q_int(p as i64);
    Ok(ledger.value("bruin_a")? * &pq * &pq + ledger.value("bruin_b")? * &pq
        + ledger.value("bruin_c")?)
}

/// Which admissible metric the comparison constants refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMode {
    Mu0,
    MuE,
}

/// j-height bound from a degree-normalized Arakelov pairing against the
/// infinity cusp: (p+1)·(pairing + sup-norm bound + A₀·(p+1)), with the A₀
/// slot taken from the mode's constant set.
pub fn j_from_pairing(
    p: u64,
    pairing: &Q,
    ledger: &Ledger,
    mode: PairingMode,
) -> Result<Q, HeightsError> {
    let a0 = match mode {
        PairingMode::Mu0 => ledger.value("a0_mu0")?,
        PairingMode::MuE => ledger.value("a0_mue")?,
    };
    let p1 = q_int(p as i64 + 1);
    Ok(&p1 * (pairing + bruin_sup(p, ledger)? + a0 * &p1))
}

/// j-height from a normalized theta height. The shifted variant (base point
/// moved by the half-canonical class) carries slope 12(p+1)/(p−13); the
/// plain difference P−∞ picks up a factor 4 from quadraticity, giving
/// asymptotic slope 48.
pub fn theta_to_j(
    p: u64,
    h_theta: &Q,
    ledger: &Ledger,
    shifted: bool,
) -> Result<Q, HeightsError> {
    if p == 13 {
        return Err(HeightsError::PDegenerate);
    }
    let slope = q_int(12 * (p as i64 + 1)) / q_int(p as i64 - 13);
    let p3 = q_int(p as i64).pow(3);
    if shifted {
        Ok(&slope * h_theta + ledger.value("gamma")? * p3)
    } else {
        Ok(q_int(4) * &slope * h_theta + ledger.value("gamma1")? * p3)
    }
}

/// Degree and normalized Néron-Tate height bounds for the image of the
/// curve (d = 1) or of its symmetric square (d = 2) inside the jacobian.
#[derive(Debug, Clone)]
pub struct WdEstimate {
    pub d: u8,
    pub deg_bound: BoundExpr,
    pub height_bound: BoundExpr,
}

/// d = 1: deg ≤ g and height ≤ g·c_mu·log p (essential minimum through the
/// Zhang inequality). d = 2: the pull-back of the product polarization
/// under (x,y) ↦ (x±y) squares the sheaf, giving deg ≤ 8g² and height
/// ≤ 64g²·c_mu·log p; this needs gonality > 2, i.e. p > 71.
pub fn wd_estimate(p: u64, d: u8, ledger: &Ledger) -> Result<WdEstimate, HeightsError> {
    assert!(d == 1 || d == 2, "only d = 1 and d = 2 are supported");
    if d == 2 && p <= 71 {
        return Err(HeightsError::GonalityPrecondition(p));
    }
    let g = q_int(fiber::genus(p)? as i64);
    let c_mu = ledger.value("c_mu")?;
    let (deg, height) = match d {
        1 => (g.clone(), &g * &c_mu),
        _ => {
            let g2 = &g * &g;
            (q_int(8) * &g2, q_int(64) * &g2 * &c_mu)
        }
    };
    Ok(WdEstimate {
        d,
        deg_bound: BoundExpr::term(deg, 0, 0),
        height_bound: BoundExpr::term(height, 0, 1),
    })
}

/// Degree and height of a product cycle under the Segre polarization:
/// deg = C(dV+dW, dV)·degV·degW and
/// h = C(dV+dW+1, dV)·degV·hW + C(dV+dW+1, dW)·degW·hV.
pub fn segre_degree_height(
    d_v: u32,
    d_w: u32,
    deg_v: &Q,
    deg_w: &Q,
    h_v: &Q,
    h_w: &Q,
) -> (Q, Q) {
    let d = (d_v + d_w) as u64;
    let degree = Q::from_integer(binomial(d, d_v as u64)) * deg_v * deg_w;
    let height = Q::from_integer(binomial(d + 1, d_v as u64)) * deg_v * h_w
        + Q::from_integer(binomial(d + 1, d_w as u64)) * deg_w * h_v;
    (degree, height)
}

/// Which shape the Bézout error term takes: O(p³) from the unconditional
/// theta sup-norm estimate, or O(p log p) under Autissier's sharpening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrMode {
    P3,
    Autissier,
}

impl fmt::Display for ErrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrMode::P3 => write!(f, "p3"),
            ErrMode::Autissier => write!(f, "autissier"),
        }
    }
}

fn bezout_error_factor(p: u64, ledger: &Ledger, err_mode: ErrMode) -> Result<Q, HeightsError> {
    Ok(match err_mode {
        ErrMode::P3 => ledger.value("c_bezout_err3")? * q_int(p as i64).pow(3),
        ErrMode::Autissier => ledger.value("c_bezout_err1")? * q_int(p as i64) * ln_upper(p),
    })
}

/// Main and error parts of the arithmetic Bézout bound for a proper
/// intersection V ∩ W inside the theta-polarized jacobian:
///
/// main = ½(4N₀²)^(dV+dW)·[(dW+1)·C(dV+dW+1,dV)·hW·degV
///                        + (dV+1)·C(dV+dW+1,dW)·hV·degW],
/// error = E(p)·(dV+dW)·½(4N₀²)^(dV+dW−1)·C(dV+dW,dV)·degV·degW,
///
/// where E(p) is the selected error factor and N₀ = num((p−1)/12).
#[allow(clippy::too_many_arguments)]
pub fn bezout_parts(
    p: u64,
    d_v: u32,
    d_w: u32,
    deg_v: &Q,
    deg_w: &Q,
    h_v: &Q,
    h_w: &Q,
    ledger: &Ledger,
    err_mode: ErrMode,
) -> Result<(Q, Q), HeightsError> {
    let g = fiber::genus(p)?;
    let dim = (d_v + d_w) as u64;
    if dim > g {
        return Err(HeightsError::DimensionOverflow { dim, genus: g });
    }
    let n0q = q_int(n0(p) as i64);
    let big_n = q_int(4) * &n0q * &n0q;
    let half = Q::new(BigInt::one(), BigInt::from(2));
    let main = &half
        * big_n.pow(dim as i32)
        * (q_int(d_w as i64 + 1) * Q::from_integer(binomial(dim + 1, d_v as u64)) * h_w * deg_v
            + q_int(d_v as i64 + 1)
                * Q::from_integer(binomial(dim + 1, d_w as u64))
                * h_v
                * deg_w);
    let error = if dim == 0 {
        Q::zero()
    } else {
        bezout_error_factor(p, ledger, err_mode)?
            * q_int(dim as i64)
            * &half
            * big_n.pow(dim as i32 - 1)
            * Q::from_integer(binomial(dim, d_v as u64))
            * deg_v
            * deg_w
    };
    Ok((main, error))
}

#[allow(clippy::too_many_arguments)]
pub fn bezout_bound(
    p: u64,
    d_v: u32,
    d_w: u32,
    deg_v: &Q,
    deg_w: &Q,
    h_v: &Q,
    h_w: &Q,
    ledger: &Ledger,
    err_mode: ErrMode,
) -> Result<Q, HeightsError> {
    let (main, error) = bezout_parts(p, d_v, d_w, deg_v, deg_w, h_v, h_w, ledger, err_mode)?;
    Ok(main + error)
}

/// Mumford repulsion: ĥ(P−Q) ≥ (g−2)/(4g)·(ĥ(P−∞)+ĥ(Q−∞)) − c·p².
pub fn mumford(p: u64, h_p: &Q, h_q: &Q, ledger: &Ledger) -> Result<Q, HeightsError> {
    let g = fiber::genus(p)?;
    let coeff = Q::new(BigInt::from(g as i64 - 2), BigInt::from(4 * g));
    Ok(coeff * (h_p + h_q) - ledger.value("c_mumford")? * q_int(p as i64).pow(2))
}

/// Invert the repulsion bound at equal heights: the largest h with
/// ĥ(P−Q) ≤ B is h = (2g/(g−2))·(B + c·p²). Degenerate for g ≤ 2.
pub fn mumford_invert(p: u64, b: &Q, ledger: &Ledger) -> Result<Q, HeightsError> {
    let g = fiber::genus(p)?;
    if g <= 2 {
        return Err(HeightsError::GenusDegenerate(g));
    }
    let coeff = Q::new(BigInt::from(2 * g), BigInt::from(g as i64 - 2));
    Ok(coeff * (b + ledger.value("c_mumford")? * q_int(p as i64).pow(2)))
}

/// Degree bound (dimJ−1)/(dimA−1) for the normalized image of the curve in
/// a quotient of its jacobian of dimension dimA ≥ 2.
pub fn quotient_degree_bound(dim_j: u64, dim_a: u64) -> Result<Q, HeightsError> {
    if dim_a < 2 {
        return Err(HeightsError::DimATooSmall(dim_a));
    }
    assert!(dim_j >= dim_a);
    Ok(Q::new(BigInt::from(dim_j - 1), BigInt::from(dim_a - 1)))
}

/// Conclusions available once the winding dimension is known: whether the
/// weak density inequality dim J_e ≥ g/3 + 1 holds, the degree·order cap
/// floor((g−1)/(dim J_e − 1)), and whether that cap already forces the
/// curve-to-image map to have degree one (cap ≤ 2, degree 2 being excluded
/// by the automorphism group of the curve).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BrumerGate {
    pub brumer_weak: bool,
    /// None encodes an unbounded cap (dim J_e ≤ 1)
    pub dn_max: Option<u64>,
    pub degree_one: bool,
}

pub fn brumer_gate(g: u64, dim_je: u64) -> BrumerGate {
    assert!(dim_je >= 1 && g >= dim_je);
    // dim_je >= g/3 + 1, exactly: 3·dim_je >= g + 3
    let brumer_weak = 3 * dim_je >= g + 3;
    let dn_max = if dim_je >= 2 {
        Some((g - 1) / (dim_je - 1))
    } else {
        None
    };
    let degree_one = dn_max.is_some_and(|d| d <= 2);
    BrumerGate {
        brumer_weak,
        dn_max,
        degree_one,
    }
}

/// Symbolic value c + λ·log p, keeping the log coefficient separate so cusp
/// pairings stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogLinear {
    #[serde(with = "qserde")]
    pub constant: Q,
    #[serde(with = "qserde")]
    pub log_coeff: Q,
}

impl LogLinear {
    pub fn constant(c: Q) -> Self {
        LogLinear {
            constant: c,
            log_coeff: Q::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.log_coeff.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspPairings {
    pub inf_inf: LogLinear,
    pub zero_zero: LogLinear,
}

/// Self-pairings of the two cusps from their mutual pairing:
/// [∞,∞] = [0,0] = [0,∞] − 6·log p/(p−1).
pub fn cusp_pairing_relation(p: u64, pairing_0_inf: &LogLinear) -> CuspPairings {
    let shift = Q::new(BigInt::from(6), BigInt::from(p as i64 - 1));
    let out = LogLinear {
        constant: pairing_0_inf.constant.clone(),
        log_coeff: &pairing_0_inf.log_coeff - shift,
    };
    CuspPairings {
        inf_inf: out.clone(),
        zero_zero: out,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerView {
    pub value: String,
    pub provenance: String,
}

/// Full record of one height-bound assembly: every intermediate value with
/// both its exact rational upper bound and a float rendering, plus the
/// ledger constants that went in.
#[derive(Debug, Clone, Serialize)]
pub struct BoundTrace {
    pub p: u64,
    pub err_mode: ErrMode,
    pub genus: u64,
    pub n0: u64,
    #[serde(with = "qserde")]
    pub w2_degree: Q,
    /// coefficient of log p in the symmetric-square height bound
    #[serde(with = "qserde")]
    pub w2_height_log_coeff: Q,
    #[serde(with = "qserde")]
    pub w2_height: Q,
    pub w2_height_f64: f64,
    /// h-linear Bézout main term (doubles when c_mu doubles)
    #[serde(with = "qserde")]
    pub bezout_main: Q,
    pub bezout_main_f64: f64,
    #[serde(with = "qserde")]
    pub bezout_error: Q,
    pub bezout_error_f64: f64,
    #[serde(with = "qserde")]
    pub pair_difference_bound: Q,
    /// quadratic error c_mumford·p² absorbed by the repulsion inversion,
    /// exposed separately so both readings of the final exponent are visible
    #[serde(with = "qserde")]
    pub mumford_error: Q,
    #[serde(with = "qserde")]
    pub theta_point_bound: Q,
    pub theta_point_bound_f64: f64,
    #[serde(with = "qserde")]
    pub j_bound: Q,
    pub j_bound_f64: f64,
    /// ln b(p) / ln p
    pub log_ratio: f64,
    pub ledger: BTreeMap<String, LedgerView>,
}

impl BoundTrace {
    pub fn bound(&self) -> &Q {
        &self.j_bound
    }
}

/// Assemble the quadratic-point j-height bound b(p):
/// (1) degree/height of the symmetric square and its pseudo-projection to
/// the complement of the winding quotient (same bounds), (2) Bézout with
/// dV = dW = 2 bounding the pair difference ĥ(P − w(σP)), (3) repulsion
/// inversion bounding ĥ(P−∞), (4) conversion to the j-height.
pub fn assemble_b(p: u64, ledger: &Ledger, err_mode: ErrMode) -> Result<BoundTrace, HeightsError> {
    let g = fiber::genus(p)?;
    let w2 = wd_estimate(p, 2, ledger)?;
    let deg2 = w2.deg_bound.eval_upper(p);
    let h2 = w2.height_bound.eval_upper(p);
    let h2_log_coeff = w2
        .height_bound
        .terms()
        .find(|(&(_, b), _)| b == 1)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Q::zero);
    let (main, error) = bezout_parts(p, 2, 2, &deg2, &deg2, &h2, &h2, ledger, err_mode)?;
    let pair_bound = &main + &error;
    let theta_point = mumford_invert(p, &pair_bound, ledger)?;
    let mumford_error = ledger.value("c_mumford")? * q_int(p as i64).pow(2);
    let j_bound = theta_to_j(p, &theta_point, ledger, false)?;
    let j_f64 = rat::q_to_f64(&j_bound);
    let log_ratio = j_f64.ln() / (p as f64).ln();
    let ledger_view = ledger
        .entries()
        .map(|(k, e)| {
            (
                k.clone(),
                LedgerView {
                    value: rat::format_q(&e.value),
                    provenance: e.provenance.to_string(),
                },
            )
        })
        .collect();
    Ok(BoundTrace {
        p,
        err_mode,
        genus: g,
        n0: n0(p),
        w2_degree: deg2,
        w2_height_log_coeff: h2_log_coeff,
        w2_height_f64: rat::q_to_f64(&h2),
        w2_height: h2,
        bezout_main_f64: rat::q_to_f64(&main),
        bezout_main: main,
        bezout_error_f64: rat::q_to_f64(&error),
        bezout_error: error,
        pair_difference_bound: pair_bound,
        mumford_error,
        theta_point_bound_f64: rat::q_to_f64(&theta_point),
        theta_point_bound: theta_point,
        j_bound_f64: j_f64,
        j_bound,
        log_ratio,
        ledger: ledger_view,
    })
}
