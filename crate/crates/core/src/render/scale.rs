//! Affine axis scales and "nice" tick selection.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Maps a data interval onto a pixel interval. A vertical scale is built with
/// `range = (bottom, top)` so larger values land higher on the page.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisScale {
    pub domain: (f64, f64),
    pub range: (f64, f64),
    pub orientation: Orientation,
}

impl AxisScale {
    /// Panics if the domain is empty or reversed; callers widen degenerate
    /// domains with [`nice_ticks`] first.
    pub fn new(domain: (f64, f64), range: (f64, f64), orientation: Orientation) -> Self {
        assert!(domain.0 < domain.1, "axis domain must satisfy min < max, got {domain:?}");
        AxisScale { domain, range, orientation }
    }

    pub fn horizontal(domain: (f64, f64), left: f64, right: f64) -> Self {
        Self::new(domain, (left, right), Orientation::Horizontal)
    }

    pub fn vertical(domain: (f64, f64), bottom: f64, top: f64) -> Self {
        Self::new(domain, (bottom, top), Orientation::Vertical)
    }

    /// Data value to pixel coordinate. Values outside the domain extrapolate.
    pub fn map(&self, v: f64) -> f64 {
        let (d0, d1) = self.domain;
        let (r0, r1) = self.range;
        r0 + (v - d0) / (d1 - d0) * (r1 - r0)
    }

    /// Pixel coordinate back to a data value.
    pub fn invert(&self, px: f64) -> f64 {
        let (d0, d1) = self.domain;
        let (r0, r1) = self.range;
        d0 + (px - r0) / (r1 - r0) * (d1 - d0)
    }

    /// Data units covered by one pixel.
    pub fn data_per_pixel(&self) -> f64 {
        (self.domain.1 - self.domain.0) / (self.range.1 - self.range.0).abs()
    }
}

/// Free-function form of [`AxisScale::map`].
pub fn data_to_pixels(scale: &AxisScale, v: f64) -> f64 {
    scale.map(v)
}

/// Tick step and positions covering `[lo, hi]` with a 1/2/5 x 10^k step.
#[derive(Debug, Clone, PartialEq)]
pub struct Ticks {
    pub step: f64,
    pub values: Vec<f64>,
    /// Decimal places needed to print the step exactly.
    pub decimals: usize,
}

impl Ticks {
    pub fn domain(&self) -> (f64, f64) {
        (self.values[0], *self.values.last().unwrap())
    }

    pub fn labels(&self) -> Vec<String> {
        self.values.iter().map(|v| format_fixed(*v, self.decimals)).collect()
    }
}

pub const MIN_TICKS: usize = 5;
pub const MAX_TICKS: usize = 8;

fn tick_count(lo: f64, hi: f64, step: f64) -> (f64, f64, usize) {
    let start = (lo / step + 1e-9).floor() * step;
    let end = (hi / step - 1e-9).ceil() * step;
    let n = ((end - start) / step).round() as usize + 1;
    (start, end, n)
}

/// Picks the largest 1/2/5 x 10^k step giving between 5 and 8 ticks; if no
/// step lands in range the count closest to it wins.
pub fn nice_ticks(lo: f64, hi: f64) -> Ticks {
    let (mut lo, mut hi) = (lo, hi);
    if !(hi > lo) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        lo -= pad;
        hi += pad;
    }
    let span = hi - lo;
    let top_exp = span.log10().ceil() as i32 + 1;
    let mut best: Option<(usize, f64, i32)> = None;
    for exp in (top_exp - 4..=top_exp).rev() {
        for mult in [5.0, 2.0, 1.0] {
            let step = mult * 10f64.powi(exp);
            let (_, _, n) = tick_count(lo, hi, step);
            let miss = if n < MIN_TICKS { MIN_TICKS - n } else { n.saturating_sub(MAX_TICKS) };
            if miss == 0 {
                return build_ticks(lo, hi, step, exp);
            }
            if best.map_or(true, |(m, _, _)| miss < m) {
                best = Some((miss, step, exp));
            }
        }
    }
    let (_, step, exp) = best.expect("candidate steps exist");
    build_ticks(lo, hi, step, exp)
}

fn build_ticks(lo: f64, hi: f64, step: f64, exp: i32) -> Ticks {
    let (start, _, n) = tick_count(lo, hi, step);
    let decimals = if exp < 0 { (-exp) as usize } else { 0 };
    let values = (0..n)
        .map(|i| {
            let v = start + i as f64 * step;
            // Snap to the printed precision so labels and geometry agree.
            let p = 10f64.powi(decimals as i32);
            let v = (v * p).round() / p;
            if v == 0.0 { 0.0 } else { v }
        })
        .collect();
    Ticks { step, values, decimals }
}

pub fn format_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_endpoints_and_midpoint() {
        let s = AxisScale::horizontal((0.0, 200.0), 0.0, 400.0);
        assert_eq!(s.map(0.0), 0.0);
        assert_eq!(s.map(100.0), 200.0);
        let v = AxisScale::vertical((0.0, 200.0), 400.0, 0.0);
        assert_eq!(data_to_pixels(&v, 200.0), 0.0);
        assert_eq!(v.map(0.0), 400.0);
        assert_eq!(v.invert(v.map(37.5)), 37.5);
    }

    #[test]
    #[should_panic]
    fn empty_domain_rejected() {
        AxisScale::horizontal((3.0, 3.0), 0.0, 1.0);
    }

    #[test]
    fn ticks_are_nice_and_cover() {
        for (lo, hi) in [(0.0, 200.0), (0.0, 187.3), (0.0, 1.0), (12.5, 98.0), (0.0, 6800.0), (-30.0, 45.0), (0.0, 0.0)] {
            let t = nice_ticks(lo, hi);
            let (a, b) = t.domain();
            assert!(a <= lo && b >= hi, "{lo}..{hi} -> {:?}", t.values);
            assert!((MIN_TICKS..=MAX_TICKS).contains(&t.values.len()), "{lo}..{hi} -> {:?}", t.values);
            let m = t.step / 10f64.powf(t.step.log10().floor());
            assert!([1.0, 2.0, 5.0].iter().any(|x| (x - m).abs() < 1e-9), "step {}", t.step);
        }
        assert_eq!(nice_ticks(0.0, 200.0).labels(), ["0", "50", "100", "150", "200"]);
    }

    #[test]
    fn negative_zero_prints_plain() {
        assert_eq!(format_fixed(-0.0001, 2), "0.00");
    }
}
