//! Summary metrics of an output-voltage trace.

use serde::{Deserialize, Serialize};

/// A local maximum of `|V|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    pub time: f64,
    pub magnitude: f64,
}

/// Local maxima of `|values|`, at least `min_separation` samples apart.
///
/// A sample is a candidate when it is no smaller than its left neighbour and
/// strictly larger than its right one (the last sample of a plateau).
/// Candidates are accepted greedily from the largest down, discarding any
/// within `min_separation` of one already kept. The result is in time order.
pub fn find_peaks(values: &[f64], dt: f64, min_separation: usize) -> Vec<Peak> {
    let a: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    select_maxima(&a, dt, min_separation)
}

/// Positive local maxima of the signed trace, selected like [`find_peaks`].
///
/// Troughs of an oscillating voltage show up as maxima of `|V|`, so the
/// crests alone are what repeat once per round trip of the wave.
pub fn find_crests(values: &[f64], dt: f64, min_separation: usize) -> Vec<Peak> {
    select_maxima(values, dt, min_separation)
}

fn select_maxima(a: &[f64], dt: f64, min_separation: usize) -> Vec<Peak> {
    let mut candidates: Vec<usize> = (1..a.len().saturating_sub(1))
        .filter(|&i| a[i] > 0.0 && a[i] >= a[i - 1] && a[i] > a[i + 1])
        .collect();
    candidates.sort_by(|&x, &y| a[y].total_cmp(&a[x]).then(x.cmp(&y)));
    let mut kept: Vec<usize> = Vec::new();
    for c in candidates {
        if kept.iter().all(|&k| k.abs_diff(c) >= min_separation) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    kept.into_iter()
        .map(|index| Peak {
            index,
            time: index as f64 * dt,
            magnitude: a[index],
        })
        .collect()
}

/// Median gap between consecutive peak times.
pub fn median_spacing(peaks: &[Peak]) -> Option<f64> {
    let mut gaps: Vec<f64> = peaks.windows(2).map(|w| w[1].time - w[0].time).collect();
    if gaps.is_empty() {
        return None;
    }
    gaps.sort_by(f64::total_cmp);
    let m = gaps.len() / 2;
    Some(if gaps.len() % 2 == 1 {
        gaps[m]
    } else {
        0.5 * (gaps[m - 1] + gaps[m])
    })
}

/// `max |a − b|` over the larger of the two sup norms; the plain difference
/// when both series vanish.
pub fn relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let d = a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    let s = sup(a).max(sup(b));
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageMetrics {
    pub peak_abs: f64,
    pub t_peak: f64,
    pub peaks: Vec<Peak>,
    pub peak_spacing: Option<f64>,
    pub crests: Vec<Peak>,
    pub crest_spacing: Option<f64>,
    /// `max |V|` over `t > t1 + 2θ` divided by the global `max |V|`.
    pub post_load_ratio: f64,
}

impl VoltageMetrics {
    /// `samples_per_transit` sets the peak separation (half of it);
    /// `load_end` is `t1`.
    pub fn compute(
        voltage: &[f64],
        dt: f64,
        samples_per_transit: usize,
        transit: f64,
        load_end: f64,
    ) -> Self {
        let (imax, peak_abs) = voltage
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        let sep = (samples_per_transit / 2).max(1);
        let peaks = find_peaks(voltage, dt, sep);
        let crests = find_crests(voltage, dt, sep);
        let cutoff = load_end + 2.0 * transit;
        let tail = voltage
            .iter()
            .enumerate()
            .filter(|(i, _)| *i as f64 * dt > cutoff)
            .fold(0.0_f64, |m, (_, v)| m.max(v.abs()));
        Self {
            peak_abs,
            t_peak: imax as f64 * dt,
            peak_spacing: median_spacing(&peaks),
            peaks,
            crest_spacing: median_spacing(&crests),
            crests,
            post_load_ratio: if peak_abs > 0.0 { tail / peak_abs } else { 0.0 },
        }
    }

    /// Peaks strictly after `t`.
    pub fn peaks_after(&self, t: f64) -> impl Iterator<Item = &Peak> {
        self.peaks.iter().filter(move |p| p.time > t)
    }

    /// Crests strictly after `t`.
    pub fn crests_after(&self, t: f64) -> impl Iterator<Item = &Peak> {
        self.crests.iter().filter(move |p| p.time > t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peaks_and_spacing() {
        let v: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).sin() * (-0.01 * i as f64).exp()).collect();
        let peaks = find_peaks(&v, 1.0, 10);
        // |sin| peaks every π/0.1 ≈ 31.4 samples.
        let s = median_spacing(&peaks).unwrap();
        assert!((s - 31.4).abs() <= 1.0, "{s}");
        assert!(peaks.windows(2).all(|w| w[1].magnitude < w[0].magnitude));
    }

    #[test]
    fn plateau_and_separation() {
        let v = [0.0, 1.0, 2.0, 2.0, 1.0, 1.5, 0.0];
        let p = find_peaks(&v, 1.0, 1);
        assert_eq!(p.iter().map(|p| p.index).collect::<Vec<_>>(), vec![3, 5]);
        let p = find_peaks(&v, 1.0, 3);
        assert_eq!(p.iter().map(|p| p.index).collect::<Vec<_>>(), vec![3]);
        assert!(find_peaks(&[], 1.0, 1).is_empty());
        assert!(median_spacing(&p).is_none());
    }

    #[test]
    fn summary() {
        let v = [0.0, 4.0, 1.0, 0.0, 0.5, 0.0, 0.2, 0.0];
        let m = VoltageMetrics::compute(&v, 1.0, 2, 1.0, 2.0);
        assert_eq!(m.peak_abs, 4.0);
        assert_eq!(m.t_peak, 1.0);
        assert_eq!(m.post_load_ratio, 0.2 / 4.0);
    }

    #[test]
    fn deviation() {
        assert_eq!(relative_deviation(&[1.0, -4.0], &[1.0, -3.0]), 0.25);
        assert_eq!(relative_deviation(&[0.0], &[0.0]), 0.0);
    }

    #[test]
    fn crests_skip_troughs() {
        let v = [0.0, 3.0, 0.0, -2.0, 0.0, 2.5, 0.0, -1.5, 0.0, 2.0, 0.0];
        let all = find_peaks(&v, 1.0, 1);
        assert_eq!(median_spacing(&all), Some(2.0));
        let crests = find_crests(&v, 1.0, 1);
        assert_eq!(crests.iter().map(|p| p.index).collect::<Vec<_>>(), vec![1, 5, 9]);
        assert_eq!(median_spacing(&crests), Some(4.0));
    }
}
