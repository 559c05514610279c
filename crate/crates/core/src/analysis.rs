//! Classification of computed spectra against the exact levels, relative
//! errors and convergence rates.

use alloc::format;
use alloc::vec::Vec;

use crate::assembly::Method;
use crate::error::{Error, Result};
use crate::physics::{exact_spectrum, PhysicalParams, PotentialModel};

/// Role of one computed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    /// Approximates exact level `level` (1 is the lowest state of this kappa).
    Genuine { level: u32 },
    /// Matches no exact level.
    InstilledSpurious,
    /// Matches a level of the mirrored kappa that this kappa does not have.
    CoincidenceSpurious,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Genuine { .. } => "genuine",
            Label::InstilledSpurious => "spurious:instilled",
            Label::CoincidenceSpurious => "spurious:coincidence",
        }
    }

    pub fn is_spurious(&self) -> bool {
        !matches!(self, Label::Genuine { .. })
    }

    pub fn level(&self) -> Option<u32> {
        match self {
            Label::Genuine { level } => Some(*level),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportEntry {
    /// Shifted energy.
    pub energy: f64,
    pub label: Label,
    pub exact: Option<f64>,
    pub relative_error: Option<f64>,
}

/// Parameters of the run that produced a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetadata {
    pub method: Method,
    pub interior_nodes: usize,
    pub intensity: f64,
    pub kappa: i32,
    pub charge: u32,
    pub light_speed: f64,
    pub nucleus: PotentialModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// One entry per computed value, ascending.
    pub entries: Vec<ReportEntry>,
    pub metadata: Option<RunMetadata>,
    /// Values that fell within tolerance of a level another value matched better.
    pub conflicts_resolved: usize,
    /// Exact levels skipped by the matching.
    pub missing_levels: Vec<u32>,
}

impl SpectrumReport {
    pub fn genuine(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.label.is_spurious())
    }

    pub fn spurious_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.label.is_spurious())
            .count()
    }

    pub fn instilled_count(&self) -> usize {
        self.count(Label::InstilledSpurious)
    }

    pub fn coincidence_count(&self) -> usize {
        self.count(Label::CoincidenceSpurious)
    }

    fn count(&self, label: Label) -> usize {
        self.entries.iter().filter(|e| e.label == label).count()
    }

    /// Entry for genuine level `level`.
    pub fn level(&self, level: u32) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.label.level() == Some(level))
    }

    pub fn with_metadata(mut self, metadata: RunMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }
}

/// Matching tolerances, both relative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchTolerances {
    pub relative: f64,
    pub coincidence: f64,
}

impl Default for MatchTolerances {
    fn default() -> Self {
        MatchTolerances {
            relative: 1e-3,
            coincidence: 1e-5,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    libm::fabs(a - b) / libm::fabs(b)
}

/// Exact levels of `-kappa` that are not levels of `kappa` (for `kappa > 0`
/// this is the `n_r = 1` state of `-kappa`).
pub fn mirror_candidates(params: &PhysicalParams, count: usize, tol: f64) -> Result<Vec<f64>> {
    let own = exact_spectrum(params, count + 1)?;
    let mirror = exact_spectrum(&params.with_kappa(-params.kappa())?, count + 1)?;
    Ok(mirror
        .into_iter()
        .filter(|m| own.iter().all(|o| rel(*m, *o) > tol))
        .collect())
}

/// Classify ascending shifted energies against the exact spectrum of `params`.
pub fn classify(
    computed: &[f64],
    params: &PhysicalParams,
    tol: &MatchTolerances,
) -> Result<SpectrumReport> {
    let exact = exact_spectrum(params, computed.len() + 1)?;
    let mirror = mirror_candidates(params, computed.len(), tol.coincidence)?;
    classify_against(computed, &exact, &mirror, tol)
}

/// Greedy monotone matching of ascending `computed` against ascending `exact`.
///
/// A value matches the closest not yet consumed exact level within
/// `tol.relative`; earlier levels left behind are recorded as missing. When
/// the following computed value is closer to the same level, the current one
/// is treated as spurious instead. Two values both within `tol.coincidence`
/// of one level are a [`Error::MatchingConflict`].
pub fn classify_against(
    computed: &[f64],
    exact: &[f64],
    mirror: &[f64],
    tol: &MatchTolerances,
) -> Result<SpectrumReport> {
    if exact.len() <= computed.len() {
        return Err(Error::Config(format!(
            "{} exact levels cannot classify {} computed values",
            exact.len(),
            computed.len()
        )));
    }
    let spurious = |v: f64| {
        if mirror.iter().any(|m| rel(v, *m) <= tol.coincidence) {
            Label::CoincidenceSpurious
        } else {
            Label::InstilledSpurious
        }
    };
    let mut entries = Vec::with_capacity(computed.len());
    let mut missing = Vec::new();
    let mut conflicts = 0;
    let mut next = 0usize;
    for (idx, &v) in computed.iter().enumerate() {
        let candidate = (next..exact.len())
            .filter(|&k| rel(v, exact[k]) <= tol.relative)
            .min_by(|&a, &b| rel(v, exact[a]).total_cmp(&rel(v, exact[b])));
        let Some(k) = candidate else {
            entries.push(ReportEntry {
                energy: v,
                label: spurious(v),
                exact: None,
                relative_error: None,
            });
            continue;
        };
        let e = exact[k];
        if let Some(&w) = computed.get(idx + 1) {
            if rel(w, e) <= tol.relative {
                conflicts += 1;
                let (dv, dw) = (libm::fabs(v - e), libm::fabs(w - e));
                if dv.max(dw) <= tol.coincidence * libm::fabs(e) {
                    return Err(Error::MatchingConflict {
                        level: k as u32 + 1,
                        first: v,
                        second: w,
                    });
                }
                if dw < dv {
                    entries.push(ReportEntry {
                        energy: v,
                        label: spurious(v),
                        exact: None,
                        relative_error: None,
                    });
                    continue;
                }
            }
        }
        missing.extend((next..k).map(|m| m as u32 + 1));
        entries.push(ReportEntry {
            energy: v,
            label: Label::Genuine {
                level: k as u32 + 1,
            },
            exact: Some(e),
            relative_error: Some(rel(v, e)),
        });
        next = k + 1;
    }
    Ok(SpectrumReport {
        entries,
        metadata: None,
        conflicts_resolved: conflicts,
        missing_levels: missing,
    })
}

/// `(level, |computed - exact| / |exact|)` for every genuine entry.
pub fn relative_errors(report: &SpectrumReport) -> Vec<(u32, f64)> {
    report
        .entries
        .iter()
        .filter_map(|e| Some((e.label.level()?, e.relative_error?)))
        .collect()
}

/// Least-squares slope of `ln(error)` against `ln(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub points: usize,
    /// Fewer than three points entered the fit.
    pub low_confidence: bool,
}

/// Fit over the pairs with positive finite error; `None` below two points.
pub fn fit_rate(node_counts: &[usize], errors: &[f64]) -> Option<RateFit> {
    let pts: Vec<(f64, f64)> = node_counts
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0 && e.is_finite())
        .map(|(n, e)| (libm::log(*n as f64), libm::log(*e)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(RateFit {
        slope: sxy / sxx,
        points: pts.len(),
        low_confidence: pts.len() < 3,
    })
}

/// Per-level relative errors over a sequence of node counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub node_counts: Vec<usize>,
    pub levels: Vec<u32>,
    /// `errors[i][l]`: node count `i`, level `levels[l]`; `None` if unmatched.
    pub errors: Vec<Vec<Option<f64>>>,
    /// Computed energies, same layout as `errors`.
    pub energies: Vec<Vec<Option<f64>>>,
    pub rates: Vec<Option<RateFit>>,
}

impl ConvergenceStudy {
    /// Gather per-level errors from one report per node count.
    pub fn from_reports(
        node_counts: &[usize],
        levels: &[u32],
        reports: &[SpectrumReport],
    ) -> Result<Self> {
        validate_node_counts(node_counts)?;
        if reports.len() != node_counts.len() {
            return Err(Error::Config("one report per node count required".into()));
        }
        let mut errors = Vec::new();
        let mut energies = Vec::new();
        for r in reports {
            errors.push(
                levels
                    .iter()
                    .map(|l| r.level(*l).and_then(|e| e.relative_error))
                    .collect::<Vec<_>>(),
            );
            energies.push(
                levels
                    .iter()
                    .map(|l| r.level(*l).map(|e| e.energy))
                    .collect::<Vec<_>>(),
            );
        }
        let rates = (0..levels.len())
            .map(|l| {
                let (ns, es): (Vec<usize>, Vec<f64>) = node_counts
                    .iter()
                    .zip(&errors)
                    .filter_map(|(n, row)| row[l].map(|e| (*n, e)))
                    .unzip();
                fit_rate(&ns, &es)
            })
            .collect();
        Ok(ConvergenceStudy {
            node_counts: node_counts.to_vec(),
            levels: levels.to_vec(),
            errors,
            energies,
            rates,
        })
    }

    /// Errors of one level across node counts.
    pub fn level_errors(&self, level: u32) -> Option<Vec<Option<f64>>> {
        let l = self.levels.iter().position(|x| *x == level)?;
        Some(self.errors.iter().map(|row| row[l]).collect())
    }

    pub fn rate(&self, level: u32) -> Option<RateFit> {
        let l = self.levels.iter().position(|x| *x == level)?;
        self.rates[l]
    }
}

/// At least two strictly increasing node counts.
pub fn validate_node_counts(node_counts: &[usize]) -> Result<()> {
    if node_counts.len() < 2 {
        return Err(Error::Config(
            "a convergence study needs at least two node counts".into(),
        ));
    }
    if !node_counts.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config(
            "node counts must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params(kappa: i32) -> PhysicalParams {
        PhysicalParams::new(1.0, 137.035_999_084, 118, kappa).unwrap()
    }

    #[test]
    fn exact_input_is_all_genuine() {
        let p = params(-2);
        let exact = exact_spectrum(&p, 10).unwrap();
        let r = classify(&exact, &p, &MatchTolerances::default()).unwrap();
        assert_eq!(r.spurious_count(), 0);
        for (i, e) in r.entries.iter().enumerate() {
            assert_eq!(
                e.label,
                Label::Genuine {
                    level: i as u32 + 1
                }
            );
            assert_eq!(e.relative_error, Some(0.0));
        }
        assert!(r.missing_levels.is_empty());
        assert!(relative_errors(&r).iter().all(|(_, e)| *e == 0.0));
    }

    #[test]
    fn coincidence_for_positive_kappa() {
        let p = params(2);
        let mut computed = vec![-1829.630750908];
        computed.extend(exact_spectrum(&p, 4).unwrap());
        let r = classify(&computed, &p, &MatchTolerances::default()).unwrap();
        assert_eq!(r.entries[0].label, Label::CoincidenceSpurious);
        assert_eq!(r.entries[1].label, Label::Genuine { level: 1 });
        assert_eq!(r.coincidence_count(), 1);
        assert_eq!(r.instilled_count(), 0);
    }

    #[test]
    fn instilled_value_near_a_level_loses_to_the_closer_one() {
        let p = params(-2);
        let exact = exact_spectrum(&p, 6).unwrap();
        let computed = vec![
            exact[0],
            exact[1],
            exact[2],
            -294.6216782193,
            exact[3] * (1.0 + 1e-6),
            exact[4],
        ];
        let r = classify(&computed, &p, &MatchTolerances::default()).unwrap();
        assert_eq!(r.entries[3].label, Label::InstilledSpurious);
        assert_eq!(r.entries[4].label, Label::Genuine { level: 4 });
        assert_eq!(r.conflicts_resolved, 1);
    }

    #[test]
    fn skipped_levels_are_recorded() {
        let p = params(-2);
        let exact = exact_spectrum(&p, 6).unwrap();
        let r = classify(
            &[exact[0], exact[2], exact[3]],
            &p,
            &MatchTolerances::default(),
        )
        .unwrap();
        assert_eq!(r.missing_levels, vec![2]);
        assert_eq!(r.entries[1].label, Label::Genuine { level: 3 });
    }

    #[test]
    fn indistinguishable_duplicates_conflict() {
        let exact = [-10.0, -5.0, -2.0];
        let e = classify_against(&[-10.0, -10.0], &exact, &[], &MatchTolerances::default())
            .unwrap_err();
        assert!(matches!(e, Error::MatchingConflict { level: 1, .. }));
    }

    #[test]
    fn appending_exact_levels_does_not_change_labels() {
        let p = params(-2);
        let exact = exact_spectrum(&p, 12).unwrap();
        let computed = vec![exact[0] * 1.0001, exact[1], -300.0, exact[3]];
        let t = MatchTolerances::default();
        let a = classify_against(&computed, &exact[..5], &[], &t).unwrap();
        let b = classify_against(&computed, &exact, &[], &t).unwrap();
        assert_eq!(a, b);
        assert!(classify_against(&computed, &exact[..4], &[], &t).is_err());
    }

    #[test]
    fn rate_fits() {
        let ns = [100, 200, 400, 800];
        let errs: Vec<f64> = ns.iter().map(|n| 3.0 * (*n as f64).powi(-2)).collect();
        let f = fit_rate(&ns, &errs).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!(!f.low_confidence);
        let flat = fit_rate(&ns, &[1e-5; 4]).unwrap();
        assert!(flat.slope.abs() < 1e-12);
        let two = fit_rate(&[100, 200], &[1e-3, 2.5e-4]).unwrap();
        assert!(two.low_confidence);
        assert!(fit_rate(&[100], &[1e-3]).is_none());
        assert!(validate_node_counts(&[200, 100]).is_err());
        assert!(validate_node_counts(&[100]).is_err());
    }
}
