//! CSV serialization. Numbers are written like C's `%.17g`; every file may start with
//! `# key=value` comment lines carrying provenance.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::flows::{ConservedLedger, Trajectory};
use crate::spectral::{Field, PeriodicGrid};

/// Version string written into provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats `x` as C's `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Round to 17 significant digits first; the decimal exponent of the rounded value decides.
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Ordered `key=value` pairs written as leading `#` comment lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub entries: Vec<(String, String)>,
}

impl Provenance {
    /// Config hash, seed and library version, the minimum every experiment output carries.
    pub fn new(config_hash: &str, seed: u64) -> Self {
        Self::default()
            .with("config_hash", config_hash)
            .with("seed", seed)
            .with("version", VERSION)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn write_to(&self, w: &mut impl Write) -> Result<()> {
        for (k, v) in &self.entries {
            if k.contains(['\n', '=']) || v.contains('\n') {
                return Err(Error::InvalidInput(format!("bad provenance entry {k:?}")));
            }
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }
}

/// Streams a table with a provenance header, a column header and `%.17g` cells.
pub struct TableWriter<W: Write> {
    inner: csv::Writer<W>,
    width: usize,
}

impl<W: Write> TableWriter<W> {
    pub fn new(mut out: W, meta: &Provenance, columns: &[&str]) -> Result<Self> {
        meta.write_to(&mut out)?;
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(columns)?;
        Ok(Self {
            inner,
            width: columns.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        self.text_row(values.iter().map(|&v| fmt_g17(v)))
    }

    /// A row of preformatted cells, for tables mixing numbers and labels.
    pub fn text_row<S: AsRef<[u8]>>(&mut self, cells: impl IntoIterator<Item = S>) -> Result<()> {
        let cells: Vec<S> = cells.into_iter().collect();
        if cells.len() != self.width {
            return Err(Error::InvalidInput(format!(
                "row has {} cells, header has {}",
                cells.len(),
                self.width
            )));
        }
        self.inner.write_record(cells)?;
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// `x,value`, one row per node.
pub fn write_field(out: impl Write, field: &Field, meta: &Provenance) -> Result<()> {
    let meta = meta.clone().with("period", fmt_g17(field.grid().period()));
    let mut w = TableWriter::new(out, &meta, &["x", "value"])?;
    for (j, &v) in field.samples().iter().enumerate() {
        w.row(&[field.grid().node(j), v])?;
    }
    w.finish()?;
    Ok(())
}

/// `xi,re,im` in FFT slot order.
pub fn write_spectrum(out: impl Write, field: &Field, meta: &Provenance) -> Result<()> {
    let mut w = TableWriter::new(out, meta, &["xi", "re", "im"])?;
    for (xi, c) in field.grid().wavenumbers().iter().zip(field.spectrum()) {
        w.row(&[*xi, c.re, c.im])?;
    }
    w.finish()?;
    Ok(())
}

/// Long format `t,x,value`.
pub fn write_trajectory(out: impl Write, traj: &Trajectory, meta: &Provenance) -> Result<()> {
    let mut w = TableWriter::new(out, meta, &["t", "x", "value"])?;
    let grid = traj.grid();
    for (&t, q) in traj.times.iter().zip(&traj.states) {
        for (j, &v) in q.samples().iter().enumerate() {
            w.row(&[t, grid.node(j), v])?;
        }
    }
    w.finish()?;
    Ok(())
}

/// `t,P,HKdV,alpha_k1,...`; the probe energies go into the header as `probe_kappas`.
pub fn write_ledger(out: impl Write, ledger: &ConservedLedger, meta: &Provenance) -> Result<()> {
    let probes: Vec<String> = ledger.probe_kappas.iter().map(|&k| fmt_g17(k)).collect();
    let meta = meta.clone().with("probe_kappas", probes.join(";"));
    let alpha_names: Vec<String> = (1..=ledger.probe_kappas.len())
        .map(|i| format!("alpha_k{i}"))
        .collect();
    let mut columns = vec!["t", "P", "HKdV"];
    columns.extend(alpha_names.iter().map(String::as_str));
    let mut w = TableWriter::new(out, &meta, &columns)?;
    for i in 0..ledger.len() {
        let mut row = vec![ledger.times[i], ledger.momentum[i], ledger.energy[i]];
        row.extend(ledger.alpha.iter().map(|col| col[i]));
        w.row(&row)?;
    }
    w.finish()?;
    Ok(())
}

/// Reads an `x,value` table. The period comes from `period` if given, else from a
/// `# period=` header line, else from `n (x_1 - x_0)`. Nodes must be uniform and start at 0.
pub fn read_field(input: impl Read, period: Option<f64>) -> Result<Field> {
    let mut text = String::new();
    let mut input = input;
    input.read_to_string(&mut text)?;
    let header_period = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l.trim_start_matches('#').trim().strip_prefix("period="))
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad period {v:?}")))
        })
        .next()
        .transpose()?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("missing column {name:?}")))
    };
    let (xc, vc) = (col("x")?, col("value")?);
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let parse = |i: usize| {
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number {s:?}")))
        };
        xs.push(parse(xc)?);
        vs.push(parse(vc)?);
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput("field table needs at least two rows".into()));
    }
    let n = xs.len();
    let period = match period.or(header_period) {
        Some(p) => p,
        None => n as f64 * (xs[1] - xs[0]),
    };
    let grid = PeriodicGrid::new(period, n)?;
    let tol = 1e-9 * period;
    if let Some(j) = (0..n).find(|&j| (xs[j] - grid.node(j)).abs() > tol) {
        return Err(Error::InvalidInput(format!(
            "node {j} at x = {} is off the uniform grid (expected {})",
            xs[j],
            grid.node(j)
        )));
    }
    Field::from_samples(&grid, vs)
}
