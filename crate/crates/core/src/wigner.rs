//! Wigner d-function rows `d^S_{0k}(β)` and the Bessel functions they tend to.
//!
//! Sign convention: `d_{0k}(β)` is the rotation-matrix element whose large-`S`
//! limit is `J_{-k}(m)` with `β = 2m/(2S+1)`, so odd `k > 0` entries are negative
//! for small positive `β`. Only squared magnitudes and the `k = 0` entry feed the
//! link model, so the convention never changes a reported number.

use crate::error::{Error, Result};

/// Largest |x| accepted by [`bessel_j`].
pub const BESSEL_MAX_ARG: f64 = 50.0;

/// Sideband count at which the Bessel limit is considered reliable.
pub const ASYMPTOTIC_REGIME_MIN: u32 = 100;

/// Default number of sidebands on each side of the carrier in exact mode.
pub const DEFAULT_SIDEBANDS: u32 = 1024;

const RESCALE_ABOVE: f64 = 1e200;
const RESCALE_BY: f64 = 1e-200;

/// Number of sidebands `S` on each side of the carrier; `2S+1` modes in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SidebandCount(u32);

impl SidebandCount {
    pub fn new(s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::invalid("sidebands", "need at least one sideband"));
        }
        Ok(SidebandCount(s))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Total number of spectral modes, `2S+1`.
    pub fn modes(self) -> usize {
        2 * self.0 as usize + 1
    }

    /// Whether `S` is large enough for the Bessel limit to stand in for the exact row.
    pub fn is_asymptotic_regime(self) -> bool {
        self.0 >= ASYMPTOTIC_REGIME_MIN
    }
}

impl Default for SidebandCount {
    fn default() -> Self {
        SidebandCount(DEFAULT_SIDEBANDS)
    }
}

/// d-function argument for modulation index `m`: `β = 2m/(2S+1)`.
pub fn beta_from_modulation(m: f64, s: SidebandCount) -> Result<f64> {
    if !m.is_finite() || m < 0.0 {
        return Err(Error::invalid("m", format!("modulation index must be finite and >= 0, got {m}")));
    }
    Ok(2.0 * m / s.modes() as f64)
}

/// Inverse of [`beta_from_modulation`]; the effective modulation index of an angle.
pub fn modulation_from_beta(beta: f64, s: SidebandCount) -> f64 {
    0.5 * beta * s.modes() as f64
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&beta) {
        return Err(Error::invalid("beta", format!("expected 0 <= beta <= pi, got {beta}")));
    }
    Ok(())
}

/// One row `k = -S..=S` of `d^S_{0k}(β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DFunctionRow {
    pub sidebands: SidebandCount,
    pub beta: f64,
    values: Vec<f64>,
}

impl DFunctionRow {
    /// Entry for sideband index `k`; zero outside `-S..=S`.
    pub fn get(&self, k: i64) -> f64 {
        let s = self.sidebands.get() as i64;
        if k < -s || k > s {
            return 0.0;
        }
        self.values[(k + s) as usize]
    }

    /// Values ordered from `k = -S` to `k = S`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(k, d_{0k})` pairs from `k = -S` upwards.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let s = self.sidebands.get() as i64;
        self.values.iter().enumerate().map(move |(i, &v)| (i as i64 - s, v))
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    fn from_nonnegative(sidebands: SidebandCount, beta: f64, upper: &[f64]) -> Self {
        let s = sidebands.get() as usize;
        let mut values = vec![0.0; 2 * s + 1];
        for (k, &v) in upper.iter().enumerate() {
            values[s + k] = v;
            values[s - k] = if k % 2 == 0 { v } else { -v };
        }
        DFunctionRow { sidebands, beta, values }
    }
}

/// `1 - P_l(x)` and `1 - P_{l-1}(x)` at `x = 1 - u`.
///
/// Running the Legendre recurrence on `q_l = 1 - P_l` keeps full relative
/// precision when `β` is tiny and `cos β` sits next to 1.
fn legendre_defect(l: u32, u: f64) -> (f64, f64) {
    let (mut q_prev, mut q) = (0.0, u);
    for n in 1..l {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * (u * (1.0 - q) + q) - n * q_prev) / (n + 1.0);
        q_prev = q;
        q = next;
    }
    (q, q_prev)
}

/// `d^S_{00}(β) = P_S(cos β)`.
pub fn d00(s: SidebandCount, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let u = 2.0 * (0.5 * beta).sin().powi(2);
    Ok(1.0 - legendre_defect(s.get(), u).0)
}

/// Full row `d^S_{0k}(β)`, `k = -S..=S`.
///
/// Runs the three-term recurrence in `k` downwards from `k = S`, which is the
/// stable direction through the region where the row decays, rescaling on the
/// way so nothing overflows. The row is then normalised to unit length and its
/// sign fixed against the Legendre values of `d_{00}` and `d_{01}`.
pub fn d_row(s: SidebandCount, beta: f64) -> Result<DFunctionRow> {
    check_beta(beta)?;
    let n = s.get() as usize;
    let mut upper = vec![0.0; n + 1];
    if beta == 0.0 {
        upper[0] = 1.0;
        return Ok(DFunctionRow::from_nonnegative(s, beta, &upper));
    }
    if beta == std::f64::consts::PI {
        upper[0] = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        return Ok(DFunctionRow::from_nonnegative(s, beta, &upper));
    }

    let sf = n as f64;
    let cot = beta.cos() / beta.sin();
    upper[n] = 1.0;
    let mut top = n;
    for k in (1..=n).rev() {
        let kf = k as f64;
        let above = if k < n { upper[k + 1] } else { 0.0 };
        let a = ((sf - kf) * (sf + kf + 1.0)).sqrt();
        let b = ((sf + kf) * (sf - kf + 1.0)).sqrt();
        let next = -(a * above + 2.0 * kf * cot * upper[k]) / b;
        upper[k - 1] = next;
        if next.abs() > RESCALE_ABOVE {
            for v in &mut upper[k - 1..=top] {
                *v *= RESCALE_BY;
            }
            // entries that underflowed to zero no longer need rescaling
            while top > k - 1 && upper[top] == 0.0 {
                top -= 1;
            }
        }
    }

    let peak = upper.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let norm = (upper[0] / peak).powi(2) + 2.0 * upper[1..].iter().map(|v| (v / peak).powi(2)).sum::<f64>();
    let scale = (peak * norm.sqrt()).recip();

    let u = 2.0 * (0.5 * beta).sin().powi(2);
    let (q_s, q_s1) = legendre_defect(s.get(), u);
    let p_s = 1.0 - q_s;
    let p_s1 = 1.0 - q_s1;
    let d0_ref = p_s;
    let d1_ref = -sf * (p_s1 - beta.cos() * p_s) / (beta.sin() * (sf * (sf + 1.0)).sqrt());
    let sign = if d0_ref * upper[0] + d1_ref * upper[1] < 0.0 { -scale } else { scale };
    for v in &mut upper {
        *v *= sign;
    }
    Ok(DFunctionRow::from_nonnegative(s, beta, &upper))
}

/// `J_0(x) .. J_{max_order}(x)` for `|x| <= 50` by Miller's downward recurrence,
/// normalised with `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_orders(max_order: usize, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() || x.abs() > BESSEL_MAX_ARG {
        return Err(Error::invalid("x", format!("Bessel argument must satisfy |x| <= {BESSEL_MAX_ARG}, got {x}")));
    }
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let ax = x.abs();
    let reach = max_order.max(ax.ceil() as usize);
    let mut start = reach + 32 + (40.0 * reach as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let mut j = vec![0.0; start + 2];
    j[start] = 1.0;
    let mut top = start;
    let two_over_x = 2.0 / ax;
    for k in (1..=start).rev() {
        let v = k as f64 * two_over_x * j[k] - j[k + 1];
        j[k - 1] = v;
        if v.abs() > RESCALE_ABOVE {
            for w in &mut j[k - 1..=top] {
                *w *= RESCALE_BY;
            }
            while top > k - 1 && j[top] == 0.0 {
                top -= 1;
            }
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    for (n, o) in out.iter_mut().enumerate() {
        let v = j[n] / norm;
        *o = if x < 0.0 && n % 2 == 1 { -v } else { v };
    }
    Ok(out)
}

/// Bessel function of the first kind `J_n(x)` for integer `n` and `|x| <= 50`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    let order = n.unsigned_abs() as usize;
    let v = bessel_j_orders(order, x)?[order];
    Ok(if n < 0 && order % 2 == 1 { -v } else { v })
}

/// Exact finite-`S` d-functions, or their Bessel limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DMode {
    Exact,
    #[default]
    Asymptotic,
}

/// Evaluates d-function quantities for a fixed `S` in the chosen mode.
///
/// In asymptotic mode every `d^S_{0k}(β)` becomes `J_{-k}(m_eff)` with
/// `m_eff = β(2S+1)/2`, the modulation index that angle corresponds to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DFunction {
    pub sidebands: SidebandCount,
    pub mode: DMode,
}

impl DFunction {
    pub fn new(sidebands: SidebandCount, mode: DMode) -> Self {
        DFunction { sidebands, mode }
    }

    pub fn d00(&self, beta: f64) -> Result<f64> {
        match self.mode {
            DMode::Exact => d00(self.sidebands, beta),
            DMode::Asymptotic => {
                check_beta(beta)?;
                bessel_j(0, modulation_from_beta(beta, self.sidebands))
            }
        }
    }

    pub fn row(&self, beta: f64) -> Result<DFunctionRow> {
        match self.mode {
            DMode::Exact => d_row(self.sidebands, beta),
            DMode::Asymptotic => {
                check_beta(beta)?;
                let n = self.sidebands.get() as usize;
                let mut upper = bessel_j_orders(n, modulation_from_beta(beta, self.sidebands))?;
                // d_{0k} -> J_{-k} = (-1)^k J_k
                for (k, v) in upper.iter_mut().enumerate() {
                    if k % 2 == 1 {
                        *v = -*v;
                    }
                }
                Ok(DFunctionRow::from_nonnegative(self.sidebands, beta, &upper))
            }
        }
    }
}
