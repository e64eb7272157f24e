//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns flat `f64` arrays (cheap to cross the boundary as a
//! `Float64Array`) or a string. Errors come back as the core error message.

use shafer_core::catalog::{classify_regime, enclosure, ShaferParam};
use shafer_core::family::{f, find_minimum, SolverConfig};
use shafer_core::kernel::{approx, KernelSpec};
use shafer_core::oracle::GridSpec;
use shafer_core::{BoundsError, Result};
use wasm_bindgen::prelude::*;

fn js(e: BoundsError) -> String {
    e.to_string()
}

/// Regime name of `f_a`: `Increasing`, `Decreasing`, `InteriorMinimum` or
/// `Unclassified`.
#[wasm_bindgen]
pub fn regime(a: f64) -> std::result::Result<String, String> {
    let p = ShaferParam::new(a).map_err(js)?;
    Ok(classify_regime(p).to_string())
}

fn curve(a: f64, x_min: f64, x_max: f64, n: usize) -> Result<Vec<f64>> {
    let p = ShaferParam::new(a)?;
    let mut out = Vec::with_capacity(2 * n);
    for x in GridSpec::log(x_min, x_max, n)?.abscissae() {
        out.push(x);
        out.push(f(p, x)?);
    }
    Ok(out)
}

/// `f_a` on a log grid, interleaved as `[x0, f0, x1, f1, ...]`.
#[wasm_bindgen]
pub fn family_curve(a: f64, x_min: f64, x_max: f64, n: usize) -> std::result::Result<Vec<f64>, String> {
    curve(a, x_min, x_max, n).map_err(js)
}

/// `[x0, f_a(x0)]` for `1/2 < a < 2/pi`, empty otherwise.
#[wasm_bindgen]
pub fn minimum(a: f64) -> Vec<f64> {
    match find_minimum(ShaferParam(a), &SolverConfig::default()) {
        Ok(m) => vec![m.x0, m.value],
        Err(_) => Vec::new(),
    }
}

fn band(a: f64, x_min: f64, x_max: f64, n: usize) -> Result<Vec<f64>> {
    let p = ShaferParam::new(a)?;
    let mut out = Vec::with_capacity(3 * n);
    for x in GridSpec::log(x_min, x_max, n)?.abscissae() {
        let e = enclosure(p, x)?;
        out.extend([x, e.lower, e.upper]);
    }
    Ok(out)
}

/// Enclosure of `atan` from parameter `a` on a log grid, as
/// `[x, lower, upper, ...]` triples.
#[wasm_bindgen]
pub fn enclosure_band(a: f64, x_min: f64, x_max: f64, n: usize) -> std::result::Result<Vec<f64>, String> {
    band(a, x_min, x_max, n).map_err(js)
}

/// Default kernel at `x`: `[value, error_bound]`.
#[wasm_bindgen]
pub fn kernel_approx(x: f64) -> Vec<f64> {
    let cv = approx(&KernelSpec::default(), x);
    vec![cv.value, cv.error_bound]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(regime(0.6).unwrap(), "InteriorMinimum");
        assert_eq!(regime(0.25).unwrap(), "Increasing");
        assert!(regime(f64::NAN).is_err());
    }

    #[test]
    fn minimum_only_in_the_interior_regime() {
        let m = minimum(0.6);
        assert_eq!(m.len(), 2);
        assert!((m[1] - 1.5653892532487922).abs() < 1e-11);
        assert!(minimum(0.3).is_empty());
    }

    #[test]
    fn curve_and_band_layout() {
        let c = family_curve(1.0, 1e-3, 1e3, 50).unwrap();
        assert_eq!(c.len(), 100);
        assert_eq!(c[0], 1e-3);
        // decreasing regime
        assert!(c.chunks(2).zip(c.chunks(2).skip(1)).all(|(p, q)| q[1] < p[1]));

        let b = enclosure_band(0.5, 1e-2, 1e2, 40).unwrap();
        assert_eq!(b.len(), 120);
        assert!(b.chunks(3).all(|t| t[1] < t[0].atan() && t[0].atan() < t[2]));
        assert!(enclosure_band(0.55, 1e-2, 1e2, 40).is_err());
        assert!(family_curve(1.0, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn kernel_error_covers_atan() {
        for x in [-1e6, -3.0, -1e-9, 0.0, 0.5, 1.0, 1e4] {
            let k = kernel_approx(x);
            assert!((k[0] - x.atan()).abs() <= k[1] + 1e-15, "x = {x}");
        }
    }
}
