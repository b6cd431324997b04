//! Versioned output documents and text formats.
//!
//! CSV files start with a `# format: 1` line, use `.` decimals, `\n` line
//! endings and 17 significant digits. JSON documents carry `"format": 1`.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use trapmode_core::ellipse::EllipseMode;
use trapmode_core::geometry::DomainSpec;
use trapmode_core::lab::{Multiplicity, QuasimodeReport, TheoremCheck, TheoremOutcome, TrajectorySet};
use trapmode_core::sparse::Csr;
use trapmode_core::C64;

pub const FORMAT_VERSION: u32 = 1;

/// Shortest decimal with 17 significant digits; `nan` for NaN.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// One row of `spectra.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub k: f64,
    pub mu: C64,
    pub residual: f64,
    pub track_id: usize,
}

pub const SPECTRA_HEADER: &str = "k,re_mu,im_mu,residual,track_id";

pub fn write_spectra_csv<W: Write>(mut w: W, rows: &[SpectrumRow]) -> io::Result<()> {
    let mut s = String::new();
    writeln!(s, "# format: {FORMAT_VERSION}").unwrap();
    writeln!(s, "{SPECTRA_HEADER}").unwrap();
    for r in rows {
        writeln!(s, "{},{},{},{},{}", fmt17(r.k), fmt17(r.mu.re), fmt17(r.mu.im), fmt17(r.residual), r.track_id).unwrap();
    }
    w.write_all(s.as_bytes())
}

/// Rows ordered by `k`, then track id.
pub fn trajectory_rows(t: &TrajectorySet) -> Vec<SpectrumRow> {
    let mut rows: Vec<SpectrumRow> = t
        .tracks
        .iter()
        .flat_map(|tr| tr.points.iter().map(move |p| SpectrumRow { k: p.k, mu: p.mu, residual: p.residual, track_id: tr.id }))
        .collect();
    rows.sort_by(|a, b| a.k.total_cmp(&b.k).then(a.track_id.cmp(&b.track_id)));
    rows
}

/// Parses `spectra.csv` back (used by tests and downstream tools).
pub fn read_spectra_csv(text: &str) -> Result<Vec<SpectrumRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l.trim() == format!("# format: {FORMAT_VERSION}") => {}
        other => return Err(format!("missing format line, found {other:?}")),
    }
    if lines.next() != Some(SPECTRA_HEADER) {
        return Err("unexpected header".into());
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 5 {
                return Err(format!("bad row {l:?}"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
            Ok(SpectrumRow {
                k: num(f[0])?,
                mu: C64::new(num(f[1])?, num(f[2])?),
                residual: num(f[3])?,
                track_id: f[4].parse().map_err(|e| format!("{e}"))?,
            })
        })
        .collect()
}

/// Regular sample grid of `|u|`, NaN outside `Ω_tr`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Row-major over `(y, x)`.
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.x.len() + ix]
    }

    /// `Σ |u|² Δx Δy` over the finite samples.
    pub fn discrete_l2(&self) -> f64 {
        let dx = if self.x.len() > 1 { self.x[1] - self.x[0] } else { 0.0 };
        let dy = if self.y.len() > 1 { self.y[1] - self.y[0] } else { 0.0 };
        (self.values.iter().filter(|v| v.is_finite()).map(|v| v * v).sum::<f64>() * dx * dy).sqrt()
    }
}

pub fn write_field_csv<W: Write>(mut w: W, f: &FieldGrid) -> io::Result<()> {
    let mut s = String::new();
    writeln!(s, "# format: {FORMAT_VERSION}").unwrap();
    writeln!(s, "x,y,abs_u").unwrap();
    for (iy, &y) in f.y.iter().enumerate() {
        for (ix, &x) in f.x.iter().enumerate() {
            writeln!(s, "{},{},{}", fmt17(x), fmt17(y), fmt17(f.at(ix, iy))).unwrap();
        }
    }
    w.write_all(s.as_bytes())
}

/// Coordinate text dump `row col re im`, one entry per line.
pub fn write_matrix_coo<W: Write>(mut w: W, a: &Csr<C64>) -> io::Result<()> {
    let mut s = String::new();
    writeln!(s, "% {} {} {}", a.nrows, a.ncols, a.nnz()).unwrap();
    a.for_each(|i, j, v| writeln!(s, "{i} {j} {} {}", fmt17(v.re), fmt17(v.im)).unwrap());
    w.write_all(s.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub label: String,
    pub parity: String,
    pub m: u32,
    pub n: u32,
    pub k: f64,
    pub q: f64,
    pub a: f64,
    pub xi0: f64,
}

impl From<&EllipseMode> for ModeEntry {
    fn from(m: &EllipseMode) -> Self {
        ModeEntry {
            label: m.label(),
            parity: m.parity.as_char().to_string(),
            m: m.m,
            n: m.n,
            k: m.k,
            q: m.q,
            a: m.a,
            xi0: m.xi0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModesDoc {
    pub format: u32,
    pub a1: f64,
    pub a2: f64,
    pub modes: Vec<ModeEntry>,
}

/// `{kind, a1, a2, A1, A2, phi0, phi1, R}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryDoc {
    pub format: u32,
    pub kind: String,
    pub a1: f64,
    pub a2: f64,
    #[serde(rename = "A1")]
    pub big_a1: f64,
    #[serde(rename = "A2")]
    pub big_a2: f64,
    pub phi0: f64,
    pub phi1: f64,
    #[serde(rename = "R")]
    pub radius: f64,
}

impl GeometryDoc {
    pub fn from_domain(d: &DomainSpec) -> Option<Self> {
        let c = d.cavity?;
        Some(GeometryDoc {
            format: FORMAT_VERSION,
            kind: c.kind.name().into(),
            a1: c.inner_axes.0,
            a2: c.inner_axes.1,
            big_a1: c.outer_axes.0,
            big_a2: c.outer_axes.1,
            phi0: c.phi0,
            phi1: c.phi1(),
            radius: d.truncation_radius,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountDoc {
    pub format: u32,
    pub cavity: String,
    #[serde(rename = "R")]
    pub radius: f64,
    pub backend: String,
    pub eps1: f64,
    pub eps0: f64,
    pub k_minus: f64,
    pub k_plus: f64,
    pub step: f64,
    pub solves: usize,
    pub h_cavity: f64,
    pub count: usize,
    /// Track ids entering the box, as in `spectra.csv`.
    pub members: Vec<usize>,
    pub missing: Vec<f64>,
    pub bridged_tracks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffEntry {
    pub kind: String,
    pub core: f64,
    pub edge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeEntry {
    pub mode: ModeEntry,
    pub cutoff: CutoffEntry,
    pub eps_raw: f64,
    pub norm_check: f64,
    pub eps: f64,
    pub support_ok: bool,
}

impl QuasimodeEntry {
    pub fn new(r: &QuasimodeReport, cutoff_kind: &str) -> Self {
        QuasimodeEntry {
            mode: (&r.mode).into(),
            cutoff: CutoffEntry { kind: cutoff_kind.into(), core: r.cutoff.core, edge: r.cutoff.edge },
            eps_raw: r.eps_raw,
            norm_check: r.norm_check,
            eps: r.eps,
            support_ok: r.support_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityEntry {
    pub window: [f64; 2],
    pub labels: Vec<String>,
    pub m: usize,
    pub overlap: Vec<Vec<f64>>,
    pub eps_threshold: f64,
    pub violations: Vec<[usize; 2]>,
}

impl From<&Multiplicity> for MultiplicityEntry {
    fn from(m: &Multiplicity) -> Self {
        MultiplicityEntry {
            window: [m.window.0, m.window.1],
            labels: m.labels.clone(),
            m: m.m,
            overlap: m.overlap.clone(),
            eps_threshold: m.eps_threshold,
            violations: m.violations.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeDoc {
    pub format: u32,
    pub cavity: String,
    pub reports: Vec<QuasimodeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<MultiplicityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremDoc {
    pub format: u32,
    pub cavity: String,
    pub mode: String,
    pub k: f64,
    pub alpha: f64,
    pub mu_min: Option<f64>,
    pub eps: Option<f64>,
    pub bound: Option<f64>,
    pub budget: Option<f64>,
    pub outcome: String,
}

impl TheoremDoc {
    pub fn new(cavity: &str, mode: &str, c: &TheoremCheck) -> Self {
        TheoremDoc {
            format: FORMAT_VERSION,
            cavity: cavity.into(),
            mode: mode.into(),
            k: c.k,
            alpha: c.alpha,
            mu_min: c.mu_min,
            eps: c.eps,
            bound: c.bound,
            budget: c.budget,
            outcome: match c.outcome {
                TheoremOutcome::Pass => "pass",
                TheoremOutcome::Fail => "fail",
                TheoremOutcome::NotApplicable => "not-applicable",
            }
            .into(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 9.977120156613617, f64::MIN_POSITIVE] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt17(f64::NAN), "nan");
    }

    #[test]
    fn spectra_round_trip() {
        let rows = vec![
            SpectrumRow { k: 9.5, mu: C64::new(0.1, -1e-7), residual: 1e-15, track_id: 0 },
            SpectrumRow { k: 9.525, mu: C64::new(-3.0, -0.25), residual: 2e-14, track_id: 3 },
        ];
        let mut buf = Vec::new();
        write_spectra_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# format: 1\nk,re_mu,im_mu,residual,track_id\n"));
        assert_eq!(read_spectra_csv(&text).unwrap(), rows);
    }
}
