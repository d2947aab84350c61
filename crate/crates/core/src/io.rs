//! File formats: problem and chain CSVs in, sample/point CSVs, NetPBM
//! bitmaps, SVG plots and dimension reports out.
//!
//! Every float is written with 17 significant digits so that reading a file
//! back reproduces the exact `f64`.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::biaffine::TrapezoidChain;
use crate::dimension::DimensionReport;
use crate::error::{Error, Result};
use crate::ifs::Bitmap;
use crate::problem::InterpolationProblem;
use crate::sampled::SampledFunction;

/// Round-trip formatting: 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Deserialize)]
struct ProblemRow {
    x: f64,
    y: f64,
    s: f64,
}

#[derive(Debug, Deserialize)]
struct ChainRow {
    x: f64,
    ylow: f64,
    yhigh: f64,
}

/// Either kind of input data set.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Problem(InterpolationProblem),
    Chain(TrapezoidChain),
}

impl Input {
    /// The interpolation problem (for a chain: values `Y̲_j`, scalings
    /// `Y̅_j − Y̲_j`).
    pub fn problem(&self) -> InterpolationProblem {
        match self {
            Input::Problem(p) => p.clone(),
            Input::Chain(c) => crate::biaffine::to_interpolation_problem(c),
        }
    }
}

fn rows<T: for<'de> Deserialize<'de>>(reader: impl Read) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize().enumerate() {
        out.push(rec.map_err(|e| {
            Error::Samples(format!("row {}: {e}", i + 1))
        })?);
    }
    Ok(out)
}

/// Parses `x,y,s` rows and validates the problem.
pub fn parse_problem(reader: impl Read) -> Result<InterpolationProblem> {
    let rows: Vec<ProblemRow> = rows(reader)?;
    let (x, (y, s)) = rows.into_iter().map(|r| (r.x, (r.y, r.s))).unzip();
    Ok(InterpolationProblem::new(x, y, s)?)
}

/// Parses `x,ylow,yhigh` rows and validates the chain.
pub fn parse_chain(reader: impl Read) -> Result<TrapezoidChain> {
    let rows: Vec<ChainRow> = rows(reader)?;
    let (x, (lo, hi)) = rows.into_iter().map(|r| (r.x, (r.ylow, r.yhigh))).unzip();
    Ok(TrapezoidChain::new(x, lo, hi)?)
}

pub fn read_problem(path: &Path) -> Result<InterpolationProblem> {
    parse_problem(File::open(path)?)
}

pub fn read_chain(path: &Path) -> Result<TrapezoidChain> {
    parse_chain(File::open(path)?)
}

/// Reads a problem or a chain, told apart by the header (`ylow` present
/// means a chain).
pub fn read_input(path: &Path) -> Result<Input> {
    let mut header = String::new();
    BufReader::new(File::open(path)?).read_line(&mut header)?;
    if header.split(',').any(|h| h.trim() == "ylow") {
        Ok(Input::Chain(read_chain(path)?))
    } else {
        Ok(Input::Problem(read_problem(path)?))
    }
}

pub fn write_problem(problem: &InterpolationProblem, mut w: impl Write) -> Result<()> {
    writeln!(w, "x,y,s")?;
    for ((x, y), s) in problem.knots().iter().zip(problem.values()).zip(problem.scalings()) {
        writeln!(w, "{},{},{}", fmt17(*x), fmt17(*y), fmt17(*s))?;
    }
    Ok(())
}

/// Writes `x,ylow,yhigh,s`.
pub fn write_chain(chain: &TrapezoidChain, mut w: impl Write) -> Result<()> {
    writeln!(w, "x,ylow,yhigh,s")?;
    let s = chain.scalings();
    for (j, sj) in s.into_iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt17(chain.knots()[j]),
            fmt17(chain.lower()[j]),
            fmt17(chain.upper()[j]),
            fmt17(sj)
        )?;
    }
    Ok(())
}

/// Writes `x,f`.
pub fn write_samples(f: &SampledFunction, w: impl Write) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "x,f")?;
    for (x, y) in f.abscissae().iter().zip(f.ordinates()) {
        writeln!(w, "{},{}", fmt17(*x), fmt17(*y))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `x,f` file back.
pub fn parse_samples(reader: impl Read) -> Result<SampledFunction> {
    #[derive(Deserialize)]
    struct Row {
        x: f64,
        f: f64,
    }
    let rows: Vec<Row> = rows(reader)?;
    let (x, y) = rows.into_iter().map(|r| (r.x, r.f)).unzip();
    SampledFunction::new(x, y)
}

/// Writes `x,y`.
pub fn write_points(points: &[(f64, f64)], w: impl Write) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "x,y")?;
    for (x, y) in points {
        writeln!(w, "{},{}", fmt17(*x), fmt17(*y))?;
    }
    w.flush()?;
    Ok(())
}

/// Binary PGM (`P5`), row 0 = top (`y_max`); set pixels black on white.
pub fn write_pgm(bitmap: &Bitmap, mut w: impl Write) -> Result<()> {
    let f = bitmap.frame();
    write!(w, "P5\n{} {}\n255\n", f.width, f.height)?;
    let bytes: Vec<u8> = bitmap.bits().iter().map(|&b| if b { 0 } else { 255 }).collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Bitmap as SVG: one unit square per set pixel, in pixel coordinates.
pub fn write_bitmap_svg(bitmap: &Bitmap, mut w: impl Write) -> Result<()> {
    let f = bitmap.frame();
    let mut path = String::new();
    for (i, _) in bitmap.bits().iter().enumerate().filter(|(_, &b)| b) {
        let _ = write!(path, "M{} {}h1v1h-1z", i % f.width, i / f.width);
    }
    write!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <path d=\"{path}\" fill=\"black\"/>\n</svg>\n",
        f.width, f.height
    )?;
    Ok(())
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 480.0;
const MARGIN: f64 = 48.0;

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn fit(pts: impl Iterator<Item = (f64, f64)> + Clone) -> Self {
        let bounds = |it: &mut dyn Iterator<Item = f64>| {
            it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let mut x = bounds(&mut pts.clone().map(|p| p.0));
        let mut y = bounds(&mut pts.map(|p| p.1));
        for r in [&mut x, &mut y] {
            if !(r.1 > r.0) {
                *r = (r.0 - 0.5, r.0 + 0.5);
            }
        }
        Self { x, y }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let u = MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (PLOT_W - 2.0 * MARGIN);
        let v = PLOT_H - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (PLOT_H - 2.0 * MARGIN);
        (u, v)
    }

    fn frame(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let (x0, y0) = (MARGIN, PLOT_H - MARGIN);
        let (x1, y1) = (PLOT_W - MARGIN, MARGIN);
        let _ = writeln!(
            out,
            "<path d=\"M{x0} {y1}V{y0}H{x1}\" fill=\"none\" stroke=\"black\"/>\n\
             <text x=\"{x0}\" y=\"{}\" font-size=\"12\">{:.4}</text>\n\
             <text x=\"{x1}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n\
             <text x=\"{}\" y=\"{y0}\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n\
             <text x=\"{}\" y=\"{y1}\" font-size=\"12\" text-anchor=\"end\">{:.4}</text>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{xlabel}</text>\n\
             <text x=\"12\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">{ylabel}</text>",
            y0 + 16.0,
            self.x.0,
            y0 + 16.0,
            self.x.1,
            x0 - 4.0,
            self.y.0,
            x0 - 4.0,
            self.y.1,
            PLOT_W / 2.0,
            PLOT_H - 8.0,
            PLOT_H / 2.0,
            PLOT_H / 2.0,
        );
    }
}

fn polyline(axes: &Axes, pts: impl Iterator<Item = (f64, f64)>, style: &str) -> String {
    let coords: Vec<String> = pts
        .map(|p| {
            let (u, v) = axes.map(p);
            format!("{u:.3},{v:.3}")
        })
        .collect();
    format!("<polyline points=\"{}\" {style}/>\n", coords.join(" "))
}

fn svg_document(body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Graph samples as an SVG polyline.
pub fn write_graph_svg(f: &SampledFunction, mut w: impl Write) -> Result<()> {
    let pts = f.abscissae().iter().copied().zip(f.ordinates().iter().copied());
    let axes = Axes::fit(pts.clone());
    let mut body = String::new();
    axes.frame(&mut body, "x", "f(x)");
    body.push_str(&polyline(&axes, pts, "fill=\"none\" stroke=\"black\" stroke-width=\"0.75\""));
    w.write_all(svg_document(&body).as_bytes())?;
    Ok(())
}

/// `log N(r)` against `r log N` with the fitted line (and the closed-form
/// slope through the same centroid, when available).
pub fn write_loglog_svg(report: &DimensionReport, mut w: impl Write) -> Result<()> {
    let ln_n = (report.n as f64).ln();
    let pts: Vec<(f64, f64)> = report
        .resolutions
        .iter()
        .zip(&report.totals)
        .map(|(&r, &c)| (r as f64 * ln_n, (c as f64).ln()))
        .collect();
    let axes = Axes::fit(pts.iter().copied());
    let mut body = String::new();
    axes.frame(&mut body, "r log N", "log N(r)");
    let (xa, xb) = axes.x;
    let fit = &report.fit;
    let line = [(xa, fit.intercept + fit.slope * xa), (xb, fit.intercept + fit.slope * xb)];
    body.push_str(&polyline(&axes, line.into_iter(), "stroke=\"steelblue\" stroke-width=\"1.5\""));
    if let Some(d) = report.closed_form {
        let (mx, my) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), p| (a + p.0 / pts.len() as f64, b + p.1 / pts.len() as f64));
        let line = [(xa, my + d * (xa - mx)), (xb, my + d * (xb - mx))];
        body.push_str(&polyline(
            &axes,
            line.into_iter(),
            "stroke=\"firebrick\" stroke-dasharray=\"6 4\"",
        ));
    }
    for p in &pts {
        let (u, v) = axes.map(*p);
        let _ = writeln!(body, "<circle cx=\"{u:.3}\" cy=\"{v:.3}\" r=\"3\"/>");
    }
    let _ = writeln!(
        body,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\">slope {:.5}</text>",
        MARGIN + 8.0,
        MARGIN + 14.0,
        fit.slope
    );
    w.write_all(svg_document(&body).as_bytes())?;
    Ok(())
}

/// Writes `r,N_r,slope_partial`; the partial slope is empty where undefined.
pub fn write_report_csv(report: &DimensionReport, mut w: impl Write) -> Result<()> {
    writeln!(w, "r,N_r,slope_partial")?;
    for ((r, n), p) in report
        .resolutions
        .iter()
        .zip(&report.totals)
        .zip(report.partial_slopes())
    {
        writeln!(w, "{r},{n},{}", p.map(fmt17).unwrap_or_default())?;
    }
    Ok(())
}

/// Writes `r,k,N_rk` for every column of every resolution (`k` is 1-based).
pub fn write_columns_csv(report: &DimensionReport, w: impl Write) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "r,k,N_rk")?;
    for (r, cols) in report.resolutions.iter().zip(&report.columns) {
        for (k, c) in cols.iter().enumerate() {
            writeln!(w, "{r},{},{c}", k + 1)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ValidationError;
    use crate::ifs::Frame;

    #[test]
    fn problem_round_trip() {
        let p = InterpolationProblem::new(
            vec![0.0, 0.1, 1.0],
            vec![0.1 + 0.2, -1.0 / 3.0, 2.0],
            vec![0.3, -0.7, 0.0],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_problem(&p, &mut buf).unwrap();
        assert_eq!(parse_problem(&buf[..]).unwrap(), p);
    }

    #[test]
    fn row_numbers_in_errors() {
        let text = "x,y,s\n0,0,0.5\n1,1,0.2\n0.5,0,1.5\n";
        match parse_problem(text.as_bytes()) {
            Err(Error::Validation(v)) => {
                assert!(v.0.contains(&ValidationError::NonIncreasingKnots { row: 3, value: 0.5 }));
                assert!(v.0.contains(&ValidationError::ScalingOutOfRange { row: 3, value: 1.5 }));
            }
            other => panic!("{other:?}"),
        }
        let bad = "x,y,s\n0,0,0\n1,oops,0\n";
        let e = parse_problem(bad.as_bytes()).unwrap_err();
        assert!(e.to_string().contains("row 2"), "{e}");
    }

    #[test]
    fn chain_export_adds_scalings() {
        let c = parse_chain("x,ylow,yhigh\n0,0,0.5\n1,0.25,0.5\n".as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_chain(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,ylow,yhigh,s\n"));
        assert!(text.lines().nth(2).unwrap().ends_with(&fmt17(0.25)));
        assert_eq!(parse_chain(text.as_bytes()).unwrap(), c);
    }

    #[test]
    fn pgm_layout() {
        let f = Frame::new((0.0, 2.0), (0.0, 1.0), 2, 1).unwrap();
        let (b, _) = Bitmap::from_points(f, &[(0.5, 0.5)]);
        let mut buf = Vec::new();
        write_pgm(&b, &mut buf).unwrap();
        assert_eq!(buf, b"P5\n2 1\n255\n\x00\xff");
    }

    #[test]
    fn seventeen_digits() {
        let v = 0.1 + 0.2;
        assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
    }
}
