use serde::{Deserialize, Serialize};

use super::{BoundsError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
/// Gauss weights for the odd-indexed Kronrod nodes (including the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = g(c);
    let (mut k, mut gs) = (WGK[7] * fc, WG[3] * fc);
    for j in 0..7 {
        let pair = g(c - h * XGK[j]) + g(c + h * XGK[j]);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            gs += WG[j / 2] * pair;
        }
    }
    Segment { a, b, value: k * h, error: ((k - gs) * h).abs() }
}

/// ∫₀^∞ f(t)dt for integrable, exponentially decaying f, by adaptive Gauss–Kronrod (7/15)
/// after the map t = L·u/(1−u) on u ∈ [0, 1).
pub fn integrate_half_line(f: impl Fn(f64) -> f64, scale: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadratureResult> {
    if !(scale > 0.0) {
        return Err(BoundsError::InvalidParameter(format!("quadrature scale must be positive, got {scale}")));
    }
    let g = |u: f64| {
        let w = 1.0 - u;
        let v = f(scale * u / w) * scale / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut segs = vec![gk15(&g, 0.0, 0.5), gk15(&g, 0.5, 1.0)];
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(BoundsError::QuadratureNonConvergent { estimate: value, error });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadratureResult { value, error, intervals: segs.len() });
        }
        if segs.len() >= MAX_INTERVALS {
            return Err(BoundsError::QuadratureNonConvergent { estimate: value, error });
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        segs.push(gk15(&g, s.a, mid));
        segs.push(gk15(&g, mid, s.b));
    }
}
