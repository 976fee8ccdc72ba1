//! Cross-method comparison: conservative rebinning onto a common grid and
//! distance metrics.

use crate::csvio::CsvCurve;
use crate::error::{Error, Result};
use crate::fpt::FptDensityEstimate;
use crate::num::ks_statistic;

/// A labeled density curve queued for comparison, with the raw crossing
/// times attached when the curve came from Monte Carlo.
#[derive(Debug, Clone)]
pub struct NamedCurve {
    pub label: String,
    pub curve: CsvCurve,
    pub times: Option<Vec<f64>>,
    /// Per-bin standard errors, carried along for CSV output.
    pub stderr: Option<Vec<f64>>,
}

impl NamedCurve {
    pub fn from_estimate(label: &str, est: &FptDensityEstimate, times: Option<Vec<f64>>) -> Self {
        NamedCurve {
            label: label.to_string(),
            curve: CsvCurve::Binned {
                edges: est.bin_edges().to_vec(),
                density: est.densities(),
            },
            times,
            stderr: Some((0..est.n_bins()).map(|i| est.stderr(i)).collect()),
        }
    }

    pub fn from_points(label: &str, t: Vec<f64>, v: Vec<f64>) -> Self {
        NamedCurve {
            label: label.to_string(),
            curve: CsvCurve::Points { times: t, values: v },
            times: None,
            stderr: None,
        }
    }

    fn support(&self) -> (f64, f64) {
        match &self.curve {
            CsvCurve::Binned { edges, .. } => (edges[0], edges[edges.len() - 1]),
            CsvCurve::Points { times, .. } => (times[0], times[times.len() - 1]),
        }
    }

    /// Native resolution: bin width or maximum sample spacing.
    fn spacing(&self) -> f64 {
        match &self.curve {
            CsvCurve::Binned { edges, .. } => edges[1] - edges[0],
            CsvCurve::Points { times, .. } => times
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(0.0f64, f64::max),
        }
    }

    /// Mass-conserving rebinning onto the given edges: bin masses of a
    /// binned source are redistributed by overlap, point curves are
    /// integrated by trapezoid over each target bin.
    fn rebin(&self, edges: &[f64]) -> Vec<f64> {
        let nb = edges.len() - 1;
        let mut out = vec![0.0; nb];
        match &self.curve {
            CsvCurve::Binned { edges: se, density } => {
                for b in 0..nb {
                    let (lo, hi) = (edges[b], edges[b + 1]);
                    let mut mass = 0.0;
                    for j in 0..density.len() {
                        let (slo, shi) = (se[j], se[j + 1]);
                        let overlap = (hi.min(shi) - lo.max(slo)).max(0.0);
                        mass += density[j] * overlap;
                    }
                    out[b] = mass / (hi - lo);
                }
            }
            CsvCurve::Points { times, values } => {
                let interp = |x: f64| -> f64 {
                    match times.binary_search_by(|t| t.total_cmp(&x)) {
                        Ok(i) => values[i],
                        Err(0) => values[0],
                        Err(i) if i >= times.len() => values[values.len() - 1],
                        Err(i) => {
                            let w = (x - times[i - 1]) / (times[i] - times[i - 1]);
                            values[i - 1] * (1.0 - w) + values[i] * w
                        }
                    }
                };
                for b in 0..nb {
                    let (lo, hi) = (edges[b], edges[b + 1]);
                    // Trapezoid over the native nodes falling inside the bin.
                    let mut nodes = vec![lo];
                    for &t in times.iter() {
                        if t > lo && t < hi {
                            nodes.push(t);
                        }
                    }
                    nodes.push(hi);
                    let mut mass = 0.0;
                    for w in nodes.windows(2) {
                        mass += 0.5 * (interp(w[0]) + interp(w[1])) * (w[1] - w[0]);
                    }
                    out[b] = mass / (hi - lo);
                }
            }
        }
        out
    }
}

/// Distances between one pair of curves on the common grid.
#[derive(Debug, Clone)]
pub struct PairMetrics {
    pub a: String,
    pub b: String,
    pub l1: f64,
    pub sup: f64,
    /// Two-sample KS statistic on raw crossing times, when both sides have
    /// them.
    pub ks: Option<f64>,
}

/// Shape summary of one curve.
#[derive(Debug, Clone)]
pub struct CurveSummary {
    pub label: String,
    /// Location of the maximum on the common grid.
    pub mode: f64,
    /// Peak density value on the common grid.
    pub peak: f64,
    /// Total mass over the common support.
    pub mass: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    /// Common-grid geometry: (start, bin width, bin count).
    pub grid: (f64, f64, usize),
    pub pairs: Vec<PairMetrics>,
    pub summaries: Vec<CurveSummary>,
}

/// Resample all curves onto the coarsest common grid and compute pairwise
/// metrics. Needs at least two curves with overlapping supports.
pub fn compare(curves: &[NamedCurve]) -> Result<ComparisonReport> {
    if curves.len() < 2 {
        return Err(Error::EmptyInput(
            "comparison needs at least two curves".into(),
        ));
    }
    let width = curves.iter().map(|c| c.spacing()).fold(0.0f64, f64::max);
    let lo = curves
        .iter()
        .map(|c| c.support().0)
        .fold(f64::MIN, f64::max);
    let hi = curves
        .iter()
        .map(|c| c.support().1)
        .fold(f64::MAX, f64::min);
    let nb = ((hi - lo) / width).floor() as i64;
    if nb < 1 || !width.is_finite() || width <= 0.0 {
        return Err(Error::DisjointSupport);
    }
    let nb = nb as usize;
    let edges: Vec<f64> = (0..=nb).map(|i| lo + i as f64 * width).collect();

    let rebinned: Vec<Vec<f64>> = curves.iter().map(|c| c.rebin(&edges)).collect();

    let mut pairs = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let (fi, fj) = (&rebinned[i], &rebinned[j]);
            let l1: f64 = fi
                .iter()
                .zip(fj)
                .map(|(a, b)| (a - b).abs() * width)
                .sum();
            let sup = fi
                .iter()
                .zip(fj)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let ks = match (&curves[i].times, &curves[j].times) {
                (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => {
                    Some(ks_statistic(a, b))
                }
                _ => None,
            };
            pairs.push(PairMetrics {
                a: curves[i].label.clone(),
                b: curves[j].label.clone(),
                l1,
                sup,
                ks,
            });
        }
    }

    let summaries = curves
        .iter()
        .zip(&rebinned)
        .map(|(c, f)| {
            let (imax, peak) = f
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            CurveSummary {
                label: c.label.clone(),
                mode: lo + (imax as f64 + 0.5) * width,
                peak,
                mass: f.iter().sum::<f64>() * width,
            }
        })
        .collect();

    Ok(ComparisonReport {
        grid: (lo, width, nb),
        pairs,
        summaries,
    })
}

impl ComparisonReport {
    pub fn pair(&self, a: &str, b: &str) -> Option<&PairMetrics> {
        self.pairs
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }

    pub fn summary(&self, label: &str) -> Option<&CurveSummary> {
        self.summaries.iter().find(|s| s.label == label)
    }

    /// Plain-text rendering for the run report.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "common grid: start={} width={} bins={}\n\n",
            self.grid.0, self.grid.1, self.grid.2
        ));
        s.push_str("per-curve summaries\n");
        for c in &self.summaries {
            s.push_str(&format!(
                "  {:<16} mode={:<10.6} peak={:<12.6} mass={:.6}\n",
                c.label, c.mode, c.peak, c.mass
            ));
        }
        s.push_str("\npairwise metrics\n");
        for p in &self.pairs {
            let ks = p
                .ks
                .map(|k| format!(" ks={k:.6}"))
                .unwrap_or_default();
            s.push_str(&format!(
                "  {} vs {}: L1={:.6} sup={:.6}{}\n",
                p.a, p.b, p.l1, p.sup, ks
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn binned(label: &str, edges: Vec<f64>, density: Vec<f64>) -> NamedCurve {
        NamedCurve {
            label: label.into(),
            curve: CsvCurve::Binned { edges, density },
            times: None,
            stderr: None,
        }
    }

    #[test]
    fn identical_curves_have_zero_distance() {
        let a = binned("a", vec![0.0, 1.0, 2.0], vec![0.6, 0.4]);
        let b = binned("b", vec![0.0, 1.0, 2.0], vec![0.6, 0.4]);
        let rep = compare(&[a, b]).unwrap();
        let p = &rep.pairs[0];
        assert_eq!(p.l1, 0.0);
        assert_eq!(p.sup, 0.0);
    }

    #[test]
    fn one_bin_shift_doubles_moved_mass() {
        // Mass m moved by one bin: L1 = 2m.
        let a = binned("a", vec![0.0, 1.0, 2.0, 3.0], vec![0.5, 0.5, 0.0]);
        let b = binned("b", vec![0.0, 1.0, 2.0, 3.0], vec![0.5, 0.0, 0.5]);
        let rep = compare(&[a, b]).unwrap();
        assert_abs_diff_eq!(rep.pairs[0].l1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rebinning_conserves_mass() {
        // Fine bins rebinned onto a coarse grid keep total mass.
        let fine = binned(
            "fine",
            (0..=10).map(|i| i as f64 * 0.2).collect(),
            vec![0.1, 0.3, 0.7, 1.0, 0.9, 0.6, 0.5, 0.4, 0.3, 0.2],
        );
        let coarse = binned("coarse", vec![0.0, 0.5, 1.0, 1.5, 2.0], vec![0.0; 4]);
        let rep = compare(&[fine.clone(), coarse]).unwrap();
        let mass_native: f64 = match &fine.curve {
            CsvCurve::Binned { density, .. } => density.iter().sum::<f64>() * 0.2,
            _ => unreachable!(),
        };
        assert_abs_diff_eq!(
            rep.summary("fine").unwrap().mass,
            mass_native,
            epsilon = 1e-12
        );
    }

    #[test]
    fn disjoint_supports_error() {
        let a = binned("a", vec![0.0, 1.0], vec![1.0]);
        let b = binned("b", vec![5.0, 6.0], vec![1.0]);
        assert!(matches!(compare(&[a, b]), Err(Error::DisjointSupport)));
    }

    #[test]
    fn point_curve_rebinning_matches_trapezoid() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.02).collect();
        let v: Vec<f64> = t.iter().map(|&x| x * x).collect();
        let pts = NamedCurve::from_points("pts", t, v);
        let anchor = binned("anchor", vec![0.0, 0.5, 1.0, 1.5, 2.0], vec![0.0; 4]);
        let rep = compare(&[pts, anchor]).unwrap();
        // Bin-average of x^2 over [0.5, 1.0] is (1 - 0.125)/3 / 0.5.
        let s = rep.summary("pts").unwrap();
        assert_abs_diff_eq!(s.mass, 8.0 / 3.0, epsilon = 1e-3);
    }
}
