//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex-valued
//! integrands, with a vector-valued variant that integrates many components
//! over shared nodes (used to assemble all G_mn entries at once).

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default cap on the number of bisections.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadVecResult {
    pub values: Vec<Complex64>,
    /// Bound on the largest componentwise error.
    pub error: f64,
    pub subdivisions: usize,
}

struct Panel {
    a: f64,
    b: f64,
    values: Vec<Complex64>,
    error: f64,
    worst: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F>(f: &mut F, a: f64, b: f64, dim: usize, scratch: &mut [Complex64]) -> Panel
where
    F: FnMut(f64, &mut [Complex64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];

    f(center, scratch);
    for c in 0..dim {
        kron[c] = scratch[c] * WGK[7];
        gauss[c] = scratch[c] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        for x in [center - dx, center + dx] {
            f(x, scratch);
            for c in 0..dim {
                kron[c] += scratch[c] * WGK[j];
                if j % 2 == 1 {
                    gauss[c] += scratch[c] * WG[j / 2];
                }
            }
        }
    }
    let mut error: f64 = 0.0;
    let mut worst = 0;
    for c in 0..dim {
        kron[c] *= half;
        gauss[c] *= half;
        let e = (kron[c] - gauss[c]).norm();
        if e > error {
            error = e;
            worst = c;
        }
    }
    Panel {
        a,
        b,
        values: kron,
        error,
        worst,
    }
}

/// Integrates a `dim`-component integrand over [a, b] until the summed panel
/// error bound drops below `tol` in every component.
pub fn adaptive_quad_vec<F>(mut f: F, dim: usize, a: f64, b: f64, tol: f64) -> Result<QuadVecResult>
where
    F: FnMut(f64, &mut [Complex64]),
{
    adaptive_quad_vec_with_budget(&mut f, dim, a, b, tol, DEFAULT_MAX_SUBDIVISIONS)
}

pub fn adaptive_quad_vec_with_budget<F>(
    f: &mut F,
    dim: usize,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<QuadVecResult>
where
    F: FnMut(f64, &mut [Complex64]),
{
    quad_vec_tracked(f, dim, a, b, tol, max_subdivisions).map_err(|(e, _)| e)
}

/// Like [`adaptive_quad_vec_with_budget`], but a budget failure also reports
/// the component with the largest error on the worst remaining panel.
pub(crate) fn quad_vec_tracked<F>(
    f: &mut F,
    dim: usize,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> core::result::Result<QuadVecResult, (Error, usize)>
where
    F: FnMut(f64, &mut [Complex64]),
{
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() || dim == 0 {
        return Err((
            Error::domain("adaptive_quad needs finite limits, dim ≥ 1 and tol > 0"),
            0,
        ));
    }
    if a == b {
        return Ok(QuadVecResult {
            values: vec![Complex64::new(0.0, 0.0); dim],
            error: 0.0,
            subdivisions: 0,
        });
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    let mut heap = BinaryHeap::new();
    heap.push(kronrod_panel(f, a, b, dim, &mut scratch));
    let mut total_error = heap.peek().map_or(0.0, |p| p.error);
    let mut subdivisions = 0;

    while total_error > tol {
        if subdivisions >= max_subdivisions {
            let (values, error) = collect(&heap, dim);
            let worst = heap.peek().map_or(0, |p| p.worst);
            return Err((
                Error::Budget {
                    what: "adaptive_quad".into(),
                    estimate: values[worst].re,
                    error_estimate: error,
                },
                worst,
            ));
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in double precision
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            total_error = heap.iter().map(|p| p.error).sum();
            continue;
        }
        let left = kronrod_panel(f, worst.a, mid, dim, &mut scratch);
        let right = kronrod_panel(f, mid, worst.b, dim, &mut scratch);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // resynchronise the running total against drift
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }
    let (values, error) = collect(&heap, dim);
    Ok(QuadVecResult {
        values,
        error,
        subdivisions,
    })
}

fn collect(heap: &BinaryHeap<Panel>, dim: usize) -> (Vec<Complex64>, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    // fixed summation order keeps results reproducible
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut values = vec![Complex64::new(0.0, 0.0); dim];
    let mut error = 0.0;
    for p in panels {
        for (v, x) in values.iter_mut().zip(&p.values) {
            *v += *x;
        }
        error += p.error;
    }
    (values, error)
}

/// Scalar complex integrand over [a, b] to absolute tolerance `tol`.
pub fn adaptive_quad<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    let mut g = |x: f64, out: &mut [Complex64]| out[0] = f(x);
    let r = adaptive_quad_vec_with_budget(&mut g, 1, a, b, tol, DEFAULT_MAX_SUBDIVISIONS)?;
    Ok(QuadResult {
        value: r.values[0],
        error: r.error,
        subdivisions: r.subdivisions,
    })
}

/// Real-valued convenience wrapper around [`adaptive_quad`].
pub fn adaptive_quad_real<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = adaptive_quad(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok((r.value.re, r.error))
}
