//! Closed-form link analysis: nanowire stability, its inverse as a noise
//! standard deviation, and the bit-error densities of the binary link.
//!
//! Bit `0` noise is a standard normal; bit `1` noise is a left-skewed
//! skew-normal with shape `A <= 0`. The bit-1 density is evaluated exactly as
//! `phi(x - A) * erfc((x - A) / sqrt 2)`, without the conventional factor of 2
//! that would normalise it.

// The erf coefficients are kept digit-for-digit from the reference tables.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

/// `1 / sqrt(2 pi)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Prior probability of each bit.
pub const BIT_PRIOR: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("{name} must be finite and strictly positive (got {value})")]
    Domain { name: &'static str, value: f64 },
    #[error("grid {name} is empty")]
    EmptyGrid { name: &'static str },
}

fn positive(name: &'static str, value: f64) -> Result<f64, AnalysisError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(AnalysisError::Domain { name, value })
    }
}

/// Inputs of the stability metric `k * E * M / L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    pub k: f64,
    /// Enzyme concentration.
    pub e: f64,
    /// Magnetic field intensity.
    pub m: f64,
    /// Nanowire length (μm).
    pub l: f64,
}

impl StabilityParams {
    pub fn new(k: f64, e: f64, m: f64, l: f64) -> Self {
        StabilityParams { k, e, m, l }
    }

    fn validated(&self) -> Result<Self, AnalysisError> {
        Ok(StabilityParams {
            k: positive("k", self.k)?,
            e: positive("E", self.e)?,
            m: positive("M", self.m)?,
            l: positive("L", self.l)?,
        })
    }
}

/// Parameters of the error-probability model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    /// Skewness coefficient `A` of the bit-1 noise (non-positive).
    pub skewness: f64,
    /// Proportionality constant `k'` of the standard deviation.
    pub k_prime: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel {
            skewness: 0.0,
            k_prime: 1.0,
        }
    }
}

impl ErrorModel {
    pub fn p0(&self) -> f64 {
        BIT_PRIOR
    }

    pub fn p1(&self) -> f64 {
        BIT_PRIOR
    }

    pub fn delta(&self) -> f64 {
        skew_delta(self.skewness)
    }

    pub fn variance(&self) -> f64 {
        skew_variance(self.skewness)
    }

    pub fn std_deviation(&self, params: &StabilityParams) -> Result<f64, AnalysisError> {
        std_deviation(params, self.k_prime)
    }

    pub fn p_error(&self, x: f64) -> f64 {
        p_error(x, self.skewness)
    }
}

pub fn stability(params: &StabilityParams) -> Result<f64, AnalysisError> {
    let p = params.validated()?;
    Ok(p.k * (p.e * p.m) / p.l)
}

/// Noise standard deviation modelled as inverse stability: `k' * L / (E * M)`.
pub fn std_deviation(params: &StabilityParams, k_prime: f64) -> Result<f64, AnalysisError> {
    let p = params.validated()?;
    let k_prime = positive("k'", k_prime)?;
    Ok(k_prime * p.l / (p.e * p.m))
}

// Rational approximations of erf/erfc on [0, 0.84375], [0.84375, 1.25],
// [1.25, 1/0.35] and [1/0.35, 28], after the classic fdlibm s_erf.c.
const ERX: f64 = 8.45062911510467529297e-01;
const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 5] = [
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];
const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 6] = [
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];
const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 8] = [
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];
const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 7] = [
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

/// Horner evaluation of `c[0] + c[1] s + ...`.
fn poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * s + ci)
}

/// `1 + c[0] s + c[1] s^2 + ...`.
fn poly1(c: &[f64], s: f64) -> f64 {
    1.0 + s * poly(c, s)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        if ax < 1.0 / (1u64 << 56) as f64 {
            return 1.0 - x;
        }
        let z = x * x;
        let y = poly(&PP, z) / poly1(&QQ, z);
        return if x < 0.25 {
            1.0 - (x + x * y)
        } else {
            0.5 - (x * y + (x - 0.5))
        };
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let ratio = poly(&PA, s) / poly1(&QA, s);
        return if negative { 1.0 + ERX + ratio } else { 1.0 - ERX - ratio };
    }
    if ax >= 28.0 {
        return if negative { 2.0 } else { 0.0 };
    }
    if negative && ax >= 6.0 {
        return 2.0;
    }
    let s = 1.0 / (ax * ax);
    let (r, q) = if ax < 1.0 / 0.35 {
        (poly(&RA, s), poly1(&SA, s))
    } else {
        (poly(&RB, s), poly1(&SB, s))
    };
    // Split ax so that exp(-ax^2) is formed without losing low-order bits.
    let hi = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    let tail = (-hi * hi - 0.5625).exp() * ((hi - ax) * (hi + ax) + r / q).exp() / ax;
    if negative {
        2.0 - tail
    } else {
        tail
    }
}

/// Error density for bit `0`: the standard normal density.
pub fn p_error_bit0(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Error density for bit `1`: `phi(x - A) * erfc((x - A) / sqrt 2)`.
pub fn p_error_bit1(x: f64, a: f64) -> f64 {
    let u = x - a;
    INV_SQRT_2PI * (-0.5 * u * u).exp() * erfc(u * FRAC_1_SQRT_2)
}

/// Total error density with equal priors.
pub fn p_error(x: f64, a: f64) -> f64 {
    BIT_PRIOR * p_error_bit0(x) + BIT_PRIOR * p_error_bit1(x, a)
}

/// Location-scale version of [`p_error`]: `p_error(x / sd, A) / sd`.
pub fn p_error_scaled(x: f64, a: f64, sd: f64) -> Result<f64, AnalysisError> {
    let sd = positive("sd", sd)?;
    Ok(p_error(x / sd, a) / sd)
}

/// Per-bit components `(p_e0, p_e1)` scaled by `sd`, consistent with [`p_error_scaled`].
pub fn p_error_components_scaled(x: f64, a: f64, sd: f64) -> Result<(f64, f64), AnalysisError> {
    let sd = positive("sd", sd)?;
    Ok((p_error_bit0(x / sd) / sd, p_error_bit1(x / sd, a) / sd))
}

/// `A / sqrt(1 + A^2)`, computed so that it stays inside `(-1, 1)` for huge `|A|`.
pub fn skew_delta(a: f64) -> f64 {
    if a.abs() > 1.0 {
        a.signum() / (1.0 + (1.0 / a).powi(2)).sqrt()
    } else {
        a / (1.0 + a * a).sqrt()
    }
}

/// Variance of a unit-scale skew-normal: `1 - 2 delta^2 / pi`.
pub fn skew_variance(a: f64) -> f64 {
    let d = skew_delta(a);
    1.0 - 2.0 * d * d / PI
}

/// Stability over a full `E x M x L` grid, indexed `[e][m][l]`.
pub fn stability_surface(
    e_grid: &[f64],
    m_grid: &[f64],
    l_grid: &[f64],
    k: f64,
) -> Result<Vec<Vec<Vec<f64>>>, AnalysisError> {
    for (name, grid) in [("E", e_grid), ("M", m_grid), ("L", l_grid)] {
        if grid.is_empty() {
            return Err(AnalysisError::EmptyGrid { name });
        }
    }
    e_grid
        .iter()
        .map(|&e| {
            m_grid
                .iter()
                .map(|&m| {
                    l_grid
                        .iter()
                        .map(|&l| stability(&StabilityParams::new(k, e, m, l)))
                        .collect()
                })
                .collect()
        })
        .collect()
}
