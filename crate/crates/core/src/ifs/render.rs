//! Attractor rendering: the chaos game and rasterized Hutchinson iteration.

use rayon::prelude::*;

use super::maps::PlaneMap;
use crate::error::{Error, Result};
use crate::operator::exact_graph;
use crate::problem::InterpolationProblem;
use crate::rng::SeededRng;

pub const DEFAULT_BURN_IN: usize = 100;
/// Sub-pixel samples per source pixel side in [`hutchinson_iterate`].
pub const SUBPIXEL: usize = 4;

/// A raster window over `[x_min, x_max] × [y_min, y_max]`. Row 0 is the top
/// row (`y_max`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub width: usize,
    pub height: usize,
}

impl Frame {
    pub fn new(x: (f64, f64), y: (f64, f64), width: usize, height: usize) -> Result<Self> {
        if !(x.0 < x.1 && y.0 < y.1) || width == 0 || height == 0 {
            return Err(Error::InvalidArgument("degenerate raster frame".into()));
        }
        Ok(Self {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            width,
            height,
        })
    }

    fn pixel_w(&self) -> f64 {
        (self.x_max - self.x_min) / self.width as f64
    }

    fn pixel_h(&self) -> f64 {
        (self.y_max - self.y_min) / self.height as f64
    }

    /// Column (or row) indices of the closed pixel squares containing a
    /// coordinate, already scaled to pixel units. `None` when outside.
    fn cells(t: f64, len: usize) -> Option<(usize, Option<usize>)> {
        if !(0.0..=len as f64).contains(&t) {
            return None;
        }
        let i = t.floor() as usize;
        if i == len {
            return Some((len - 1, None));
        }
        let shared = (t == i as f64 && i > 0).then(|| i - 1);
        Some((i, shared))
    }

    /// Every pixel whose closed square contains `(x, y)`; empty when the
    /// point is outside the frame.
    pub fn pixels_of(&self, x: f64, y: f64) -> impl Iterator<Item = usize> {
        let tx = (x - self.x_min) / self.pixel_w();
        let ty = (self.y_max - y) / self.pixel_h();
        let w = self.width;
        let cols = Self::cells(tx, self.width);
        let rows = Self::cells(ty, self.height);
        let mut out = [None; 4];
        if let (Some((c, c2)), Some((r, r2))) = (cols, rows) {
            let mut k = 0;
            for cc in [Some(c), c2].into_iter().flatten() {
                for rr in [Some(r), r2].into_iter().flatten() {
                    out[k] = Some(rr * w + cc);
                    k += 1;
                }
            }
        }
        out.into_iter().flatten()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bitmap {
    frame: Frame,
    bits: Vec<bool>,
}

impl Bitmap {
    pub fn empty(frame: Frame) -> Self {
        Self {
            frame,
            bits: vec![false; frame.width * frame.height],
        }
    }

    pub fn full(frame: Frame) -> Self {
        Self {
            frame,
            bits: vec![true; frame.width * frame.height],
        }
    }

    /// Rasterizes points; those outside the frame are dropped and counted.
    pub fn from_points(frame: Frame, points: &[(f64, f64)]) -> (Self, usize) {
        let mut bm = Self::empty(frame);
        let mut dropped = 0;
        for &(x, y) in points {
            if !bm.plot(x, y) {
                dropped += 1;
            }
        }
        (bm, dropped)
    }

    /// Sets the pixels containing `(x, y)`; false when outside the frame.
    pub fn plot(&mut self, x: f64, y: f64) -> bool {
        let mut any = false;
        for i in self.frame.pixels_of(x, y) {
            self.bits[i] = true;
            any = true;
        }
        any
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.frame.width + col]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// 8-neighbourhood dilation by one pixel.
    pub fn dilate(&self) -> Bitmap {
        let (w, h) = (self.frame.width, self.frame.height);
        let mut out = Bitmap::empty(self.frame);
        for r in 0..h {
            for c in 0..w {
                if !self.bits[r * w + c] {
                    continue;
                }
                for rr in r.saturating_sub(1)..=(r + 1).min(h - 1) {
                    for cc in c.saturating_sub(1)..=(c + 1).min(w - 1) {
                        out.bits[rr * w + cc] = true;
                    }
                }
            }
        }
        out
    }

    /// Set pixels of `self` not covered by `other`.
    pub fn excess_over(&self, other: &Bitmap) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(&a, &b)| a && !b)
            .count()
    }

    /// True when each bitmap lies inside the one-pixel dilation of the other.
    pub fn agrees_within_one_pixel(&self, other: &Bitmap) -> bool {
        self.frame == other.frame
            && self.excess_over(&other.dilate()) == 0
            && other.excess_over(&self.dilate()) == 0
    }
}

/// A chaos-game orbit from `start`: `n_points` points recorded after
/// `burn_in` discarded steps, maps chosen uniformly by a seeded SplitMix64
/// stream.
pub fn chaos_game<M: PlaneMap>(
    maps: &[M],
    start: (f64, f64),
    n_points: usize,
    burn_in: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    let mut rng = SeededRng::new(seed);
    let mut p = start;
    for _ in 0..burn_in {
        p = maps[rng.index(maps.len())].apply(p.0, p.1);
    }
    let mut out = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        p = maps[rng.index(maps.len())].apply(p.0, p.1);
        out.push(p);
    }
    out
}

/// `k` rounds of the rasterized Hutchinson operator: every set pixel is
/// sampled on a `SUBPIXEL × SUBPIXEL` grid, each sample is pushed through
/// every map and the pixels containing the images are set.
pub fn hutchinson_iterate<M: PlaneMap>(maps: &[M], initial: &Bitmap, k: usize) -> Result<Bitmap> {
    let frame = *initial.frame();
    let (pw, ph) = (frame.pixel_w(), frame.pixel_h());
    let mut current = initial.clone();
    for _ in 0..k {
        let hits: Result<Vec<Vec<usize>>> = (0..frame.height)
            .into_par_iter()
            .map(|row| {
                let mut local = Vec::new();
                for col in 0..frame.width {
                    if !current.get(col, row) {
                        continue;
                    }
                    for a in 0..SUBPIXEL {
                        let x = frame.x_min + (col as f64 + (a as f64 + 0.5) / SUBPIXEL as f64) * pw;
                        for b in 0..SUBPIXEL {
                            let y = frame.y_max - (row as f64 + (b as f64 + 0.5) / SUBPIXEL as f64) * ph;
                            for m in maps {
                                let (u, v) = m.apply(x, y);
                                let before = local.len();
                                local.extend(frame.pixels_of(u, v));
                                if local.len() == before {
                                    return Err(Error::StripTooSmall { x: u, y: v });
                                }
                            }
                        }
                    }
                }
                Ok(local)
            })
            .collect();
        let mut next = Bitmap::empty(frame);
        for i in hits?.into_iter().flatten() {
            next.bits[i] = true;
        }
        current = next;
    }
    Ok(current)
}

/// Largest sample count used to estimate the range of `f` for framing.
const FRAME_SAMPLES: u64 = 1 << 17;

/// A window for the graph of the interpolant: `x` over `I`; `y` over the
/// range of `f` widened by `s·d∞(f, b)` on both sides and joined with the
/// range of the chord `b`, plus a 5% margin.
///
/// `T^k b` lies within `s^k d∞(f, b)` of `f`, so Hutchinson iteration
/// started from the chord raster stays inside this window up to
/// rasterization blur, which the margin absorbs.
pub fn graph_frame(problem: &InterpolationProblem, width: usize, height: usize) -> Result<Frame> {
    let n = problem.n_maps() as u64;
    let mut depth = 0;
    while n.pow(depth + 2) <= FRAME_SAMPLES {
        depth += 1;
    }
    let f = exact_graph(problem, depth)?;
    let (lo, hi) = f.min_max();
    let gap = f
        .abscissae()
        .iter()
        .zip(f.ordinates())
        .map(|(&x, &y)| (y - problem.b(x)).abs())
        .fold(0.0, f64::max);
    let spread = problem.max_scaling() * gap;
    let (b0, b1) = (problem.values()[0], problem.values()[n as usize]);
    let lo = (lo - spread).min(b0).min(b1);
    let hi = (hi + spread).max(b0).max(b1);
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    Frame::new(problem.domain(), (lo - pad, hi + pad), width, height)
}

/// The chord `b` rasterized into `frame`.
pub fn chord_bitmap(problem: &InterpolationProblem, frame: Frame) -> Bitmap {
    let (x0, xn) = problem.domain();
    // a segment crosses at most width + height pixels
    let steps = SUBPIXEL * (frame.width + frame.height);
    let mut bm = Bitmap::empty(frame);
    for i in 0..=steps {
        let x = if i == steps { xn } else { x0 + (xn - x0) * (i as f64 / steps as f64) };
        bm.plot(x, problem.b(x));
    }
    bm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::maps::build_maps;
    use crate::problem::InterpolationProblem;

    fn frame() -> Frame {
        Frame::new((0.0, 1.0), (-1.0, 1.0), 64, 48).unwrap()
    }

    #[test]
    fn pixel_lookup_closed_squares() {
        let f = Frame::new((0.0, 4.0), (0.0, 4.0), 4, 4).unwrap();
        let mut interior: Vec<_> = f.pixels_of(0.5, 3.5).collect();
        interior.sort();
        assert_eq!(interior, vec![0]);
        let mut corner: Vec<_> = f.pixels_of(1.0, 3.0).collect();
        corner.sort();
        assert_eq!(corner, vec![0, 1, 4, 5]);
        assert_eq!(f.pixels_of(4.0, 0.0).collect::<Vec<_>>(), vec![15]);
        assert_eq!(f.pixels_of(4.1, 0.0).count(), 0);
    }

    #[test]
    fn zero_rounds_is_identity() {
        let p = InterpolationProblem::uniform(vec![0.0, 0.5, 0.0], vec![0.3; 3]).unwrap();
        let maps = build_maps(&p).unwrap();
        let (b, _) = Bitmap::from_points(frame(), &[(0.2, 0.1), (0.7, -0.3)]);
        assert_eq!(hutchinson_iterate(&maps.maps, &b, 0).unwrap(), b);
    }

    #[test]
    fn escaping_images_are_reported() {
        let p = InterpolationProblem::uniform(vec![0.0, 0.9, 0.0], vec![0.0; 3]).unwrap();
        let maps = build_maps(&p).unwrap();
        let f = Frame::new((0.0, 1.0), (-0.1, 0.5), 32, 32).unwrap();
        let b = Bitmap::full(f);
        assert!(matches!(
            hutchinson_iterate(&maps.maps, &b, 1),
            Err(Error::StripTooSmall { .. })
        ));
    }

    #[test]
    fn chaos_game_on_a_line() {
        let p = InterpolationProblem::uniform(vec![0.0, 0.5, 1.0], vec![0.0; 3]).unwrap();
        let maps = build_maps(&p).unwrap();
        let pts = chaos_game(&maps.maps, (0.0, 0.0), 5_000, DEFAULT_BURN_IN, 9);
        assert!(pts.iter().all(|&(x, y)| (x - y).abs() < 1e-9));
        assert_eq!(pts, chaos_game(&maps.maps, (0.0, 0.0), 5_000, DEFAULT_BURN_IN, 9));
    }

    #[test]
    fn chord_start_stays_in_graph_frame() {
        let p = InterpolationProblem::uniform(vec![0.0, 0.9, -0.4, 0.2], vec![0.3, 0.6, -0.5, 0.4]).unwrap();
        let maps = build_maps(&p).unwrap();
        let f = graph_frame(&p, 200, 150).unwrap();
        let start = chord_bitmap(&p, f);
        assert!(start.count() >= 200);
        let img = hutchinson_iterate(&maps.maps, &start, 8).unwrap();
        assert!(img.count() > 0);
    }

    #[test]
    fn dilation_agreement() {
        let f = frame();
        let (a, _) = Bitmap::from_points(f, &[(0.505, 0.01)]);
        let (b, _) = Bitmap::from_points(f, &[(0.505 + 1.0 / 64.0, 0.01)]);
        let (c, _) = Bitmap::from_points(f, &[(0.9, 0.01)]);
        assert!(a.agrees_within_one_pixel(&b));
        assert!(!a.agrees_within_one_pixel(&c));
    }
}
