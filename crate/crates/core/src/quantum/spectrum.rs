use serde::Serialize;

use crate::{Error, Result};

pub const DEFAULT_DOUBLET_TOL: f64 = 0.1;

/// Relative size below which a second difference counts as zero when looking
/// for the inflection point.
const CURVATURE_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumAnalysis {
    pub energies: Vec<f64>,
    /// First level `n` where `E_{n+1} - 2E_n + E_{n-1}` changes sign.
    pub inflection_index: Option<usize>,
    /// One flag per adjacent pair `(E_i, E_{i+1})`.
    pub doublet_flags: Vec<bool>,
    pub doublet_count: usize,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Finds near-degenerate pairs and the inflection point of an ascending spectrum.
///
/// A pair is a doublet when its gap is below `doublet_tol` times the median of
/// the neighbouring gaps `i-2, i-1, i+1, i+2` (those that exist).
pub fn analyze_spectrum(energies: &[f64], doublet_tol: f64) -> Result<SpectrumAnalysis> {
    if energies.len() < 5 {
        return Err(Error::TooFewLevels(energies.len()));
    }
    if energies.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams("energies must be ascending".into()));
    }
    let gaps: Vec<f64> = energies.windows(2).map(|w| w[1] - w[0]).collect();
    let doublet_flags: Vec<bool> = (0..gaps.len())
        .map(|i| {
            let mut around: Vec<f64> = (i.saturating_sub(2)..=(i + 2).min(gaps.len() - 1))
                .filter(|&k| k != i)
                .map(|k| gaps[k])
                .collect();
            gaps[i] < doublet_tol * median(&mut around)
        })
        .collect();
    let doublet_count = doublet_flags.iter().filter(|f| **f).count();

    let span = energies[energies.len() - 1] - energies[0];
    let zero = CURVATURE_ZERO_TOL * span / gaps.len() as f64;
    let mut inflection_index = None;
    let mut last_sign = 0.0;
    for n in 1..energies.len() - 1 {
        let d2 = energies[n + 1] - 2.0 * energies[n] + energies[n - 1];
        if d2.abs() <= zero {
            continue;
        }
        let sign = d2.signum();
        if last_sign != 0.0 && sign != last_sign {
            inflection_index = Some(n);
            break;
        }
        last_sign = sign;
    }

    Ok(SpectrumAnalysis {
        energies: energies.to_vec(),
        inflection_index,
        doublet_flags,
        doublet_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_spectrum_has_no_structure() {
        let e: Vec<f64> = (0..21).map(|m| m as f64 - 10.0).collect();
        let a = analyze_spectrum(&e, DEFAULT_DOUBLET_TOL).unwrap();
        assert_eq!(a.doublet_count, 0);
        assert_eq!(a.inflection_index, None);
        assert_eq!(a.doublet_flags.len(), 20);
    }

    #[test]
    fn exact_pairs_are_doublets() {
        // 0, 1, 1, 4, 4, 9, 9, ...
        let mut e = vec![0.0];
        for m in 1..8 {
            let v = (m * m) as f64;
            e.push(v);
            e.push(v);
        }
        let a = analyze_spectrum(&e, DEFAULT_DOUBLET_TOL).unwrap();
        assert_eq!(a.doublet_count, 7);
        for (i, f) in a.doublet_flags.iter().enumerate() {
            assert_eq!(*f, i % 2 == 1, "pair {i}");
        }
    }

    #[test]
    fn cubic_has_inflection() {
        let e: Vec<f64> = (0..11).map(|n| ((n as f64) - 5.3).powi(3)).collect();
        let a = analyze_spectrum(&e, DEFAULT_DOUBLET_TOL).unwrap();
        let n = a.inflection_index.unwrap();
        let d2 = |n: usize| e[n + 1] - 2.0 * e[n] + e[n - 1];
        assert!(d2(n) * d2(n - 1) < 0.0);
        assert_eq!(n, 6);
    }

    #[test]
    fn too_few_levels() {
        assert!(matches!(analyze_spectrum(&[0.0, 1.0, 2.0, 3.0], 0.1), Err(Error::TooFewLevels(4))));
    }
}
