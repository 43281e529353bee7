//! Command implementations behind the `pomega` binary.

use pomega_core::appell::{mu_torsion_series, TorsionPoint};
use pomega_core::classical::{theta_jacobi_series, theta_series_at_torsion, EtaQuotient};
use pomega_core::combinatorics::{census_table, genfun, omega, Family, Side};
use pomega_core::exactalg::{format_exponent, DEFAULT_LATTICE, DEFAULT_ZETA_LATTICE};
use pomega_core::indefinite::{pbar_omega_series, PbarRoute};
use pomega_core::registry::{registry, run_identity, Overrides, Status, VerificationReport};
use pomega_core::{Error, JacobiSeries, QSeries};
use num_rational::Rational64;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Failures that end a command before any verification result exists.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration; exit code 2.
    Usage(String),
    /// A computation failed; exit code 1.
    Compute(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownIdentity(_) | Error::UnknownObject(_) | Error::Parse(_) | Error::InvalidArgument(_) => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Compute(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

/// Settings read from a TOML file; command-line flags take precedence.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// q-exponent lattice denominator for expansions.
    pub d: Option<i64>,
    /// ζ-exponent lattice denominator for expansions.
    pub dz: Option<i64>,
    pub order: Option<i64>,
    pub prec: Option<u32>,
    pub taus: Option<Vec<[f64; 2]>>,
    pub jobs: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, CliError> {
        let c: Config = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        if matches!(c.d, Some(d) if d <= 0) || matches!(c.dz, Some(d) if d <= 0) {
            return Err(CliError::Usage("config: lattice denominators must be positive".into()));
        }
        if let Some(ts) = &c.taus {
            for t in ts {
                check_tau(t[0], t[1])?;
            }
        }
        Ok(c)
    }

    /// Overrides from this config, replaced field by field by `flags`.
    pub fn overrides(&self, flags: Overrides) -> Overrides {
        Overrides {
            order: flags.order.or(self.order),
            prec: flags.prec.or(self.prec),
            taus: flags.taus.or_else(|| self.taus.as_ref().map(|ts| ts.iter().map(|t| (t[0], t[1])).collect())),
            tolerance: flags.tolerance,
        }
    }
}

fn check_tau(u: f64, v: f64) -> Result<(f64, f64), CliError> {
    if !(v > 0.0) || !u.is_finite() || !v.is_finite() {
        return Err(CliError::Usage(format!("tau = {u}+{v}i is not in the upper half plane")));
    }
    Ok((u, v))
}

/// Parses `u,v` as τ = u + iv.
pub fn parse_tau(s: &str) -> Result<(f64, f64), String> {
    let (u, v) = s.split_once(',').ok_or_else(|| format!("expected u,v, got {s:?}"))?;
    let u: f64 = u.trim().parse().map_err(|e| format!("{u:?}: {e}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?;
    check_tau(u, v).map_err(|e| e.to_string())
}

pub fn list_lines() -> Vec<String> {
    registry().iter().map(|i| format!("{:24} {:8} {}", i.id, format!("{:?}", i.kind).to_lowercase(), i.summary)).collect()
}

/// Identities whose id matches the glob, in registry order.
pub fn select(filter: Option<&str>) -> Result<Vec<&'static str>, CliError> {
    let pat = match filter {
        Some(f) => Some(glob::Pattern::new(f).map_err(|e| CliError::Usage(format!("filter {f:?}: {e}")))?),
        None => None,
    };
    Ok(registry().iter().map(|i| i.id).filter(|id| pat.as_ref().map_or(true, |p| p.matches(id))).collect())
}

/// Runs the selected identities on `jobs` worker threads. `emit` sees each
/// report in registry order as soon as it and all earlier ones are done.
pub fn run_suite(
    ids: &[&'static str],
    overrides: &Overrides,
    jobs: usize,
    mut emit: impl FnMut(&VerificationReport),
) -> Result<Vec<VerificationReport>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let (tx, rx) = std::sync::mpsc::channel();
    for (i, id) in ids.iter().enumerate() {
        let tx = tx.clone();
        let o = overrides.clone();
        let id: &'static str = id;
        pool.spawn(move || {
            let _ = tx.send((i, run_identity(id, &o)));
        });
    }
    drop(tx);
    let mut pending = BTreeMap::new();
    let mut out = Vec::with_capacity(ids.len());
    for (i, r) in rx {
        pending.insert(i, r);
        while let Some(r) = pending.remove(&out.len()) {
            let r = r.map_err(CliError::from)?;
            emit(&r);
            out.push(r);
        }
    }
    Ok(out)
}

pub fn suite_exit_code(reports: &[VerificationReport]) -> i32 {
    if reports.iter().all(|r| r.status == Status::Pass) {
        0
    } else {
        1
    }
}

pub fn report_line(r: &VerificationReport) -> String {
    serde_json::to_string(r).expect("reports serialize")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}; use json or csv")),
        }
    }
}

/// An expanded object: a q-series or a series in q and ζ.
#[derive(Clone, Debug)]
pub enum Expansion {
    Q(QSeries),
    Jacobi(JacobiSeries),
}

impl Expansion {
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Expansion::Q(s), Format::Json) => s.to_json().to_string(),
            (Expansion::Q(s), Format::Csv) => s.to_csv(),
            (Expansion::Jacobi(s), Format::Json) => s.to_json().to_string(),
            (Expansion::Jacobi(s), Format::Csv) => {
                let mut out = String::from("q_exponent,zeta_exponent,coefficient\n");
                for (q, z, c) in s.iter() {
                    out.push_str(&format!(
                        "{},{},\"{c}\"\n",
                        format_exponent(q, s.lattice()),
                        format_exponent(z, s.zeta_lattice())
                    ));
                }
                out
            }
        }
    }
}

fn family_from_tag(s: &str) -> Option<Family> {
    let norm = |t: &str| t.to_ascii_lowercase().replace(['-', '_'], "");
    Family::ALL.into_iter().find(|f| norm(f.tag()) == norm(s))
}

/// Parses a torsion point such as `tau/2+1/4`, `3tau/2`, `tau+1/2` or `1/5`.
pub fn parse_torsion(s: &str) -> Result<TorsionPoint, Error> {
    let bad = |m: &str| Error::Parse(format!("torsion point {s:?}: {m}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad("empty"));
    }
    let mut a = Rational64::from_integer(0);
    let mut b = Rational64::from_integer(0);
    let mut start = 0;
    let bytes = t.as_bytes();
    let mut terms = Vec::new();
    for i in 1..=bytes.len() {
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/' && bytes[i - 1] != b'*') {
            terms.push(&t[start..i]);
            start = i;
        }
    }
    for term in terms {
        let (neg, body) = match term.as_bytes()[0] {
            b'-' => (true, &term[1..]),
            b'+' => (false, &term[1..]),
            _ => (false, term),
        };
        let parse_rat = |x: &str| -> Result<Rational64, Error> {
            let x = if x.starts_with('/') { format!("1{x}") } else { x.to_string() };
            let x = if x.is_empty() { "1".to_string() } else { x };
            x.parse::<Rational64>().map_err(|_| bad(&format!("cannot read {x:?}")))
        };
        let (is_tau, v) = if body.contains("tau") {
            let coef = body.replacen("*tau", "", 1).replacen("tau*", "", 1).replacen("tau", "", 1);
            (true, parse_rat(&coef)?)
        } else {
            (false, parse_rat(body)?)
        };
        let v = if neg { -v } else { v };
        if is_tau {
            a += v;
        } else {
            b += v;
        }
    }
    Ok(TorsionPoint::new(a, b))
}

fn call_args<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

/// Expands a named object to O(q^order). Objects: `pbar-omega[:route]`,
/// family tags (`spt`, `spt-omega`, `p-omega`, `sptbar-omega`, `spt-G2`),
/// `omega`, `eta`, `eta^k`, η-quotients such as `eta(4)/eta(2)^2`,
/// `theta(z)` and `mu(z1,z2)` at torsion points, and `theta-jacobi`.
pub fn expand(object: &str, order: i64, d: Option<i64>, dz: Option<i64>) -> Result<Expansion, Error> {
    if order < 0 {
        return Err(Error::InvalidArgument("order must be non-negative".into()));
    }
    let obj = object.trim();
    let fixed = |name: &str| -> Result<(), Error> {
        match d {
            Some(x) if x != DEFAULT_LATTICE => Err(Error::InvalidArgument(format!(
                "{name} is expanded on the lattice q^(1/{DEFAULT_LATTICE}); got D = {x}"
            ))),
            _ => Ok(()),
        }
    };
    let d_free = d.unwrap_or(DEFAULT_LATTICE);
    if let Some(rest) = obj.strip_prefix("pbar-omega") {
        fixed("pbar-omega")?;
        let route = match rest.strip_prefix(':') {
            Some(r) => r.parse()?,
            None if rest.is_empty() => PbarRoute::Definition,
            None => return Err(Error::UnknownObject(object.into())),
        };
        return Ok(Expansion::Q(pbar_omega_series(order, route)?));
    }
    if obj == "omega" {
        fixed("omega")?;
        return Ok(Expansion::Q(omega(order)?));
    }
    if let Some(f) = family_from_tag(obj) {
        fixed(obj)?;
        return Ok(Expansion::Q(genfun(f, Side::Definition, order)?));
    }
    if obj == "theta-jacobi" {
        return Ok(Expansion::Jacobi(theta_jacobi_series(d_free, dz.unwrap_or(DEFAULT_ZETA_LATTICE), order * d_free)?));
    }
    if let Some(arg) = call_args(obj, "theta") {
        let z = parse_torsion(arg)?;
        return Ok(Expansion::Q(theta_series_at_torsion(z.a, z.b, d_free, order * d_free)?));
    }
    if let Some(args) = call_args(obj, "mu") {
        let (x, y) = args.split_once(',').ok_or_else(|| Error::Parse(format!("mu needs two arguments: {obj}")))?;
        let s = mu_torsion_series(parse_torsion(x)?, parse_torsion(y)?, d_free, order * d_free)?;
        return Ok(Expansion::Q(s));
    }
    if obj == "eta" || obj.starts_with("eta^") || obj.contains("eta(") {
        let q: EtaQuotient = match obj.strip_prefix("eta") {
            Some("") => EtaQuotient::new(&[(1, 1)]),
            Some(p) if p.starts_with('^') => {
                let r: i64 = p[1..].trim().parse().map_err(|_| Error::Parse(format!("eta power: {obj}")))?;
                EtaQuotient::new(&[(1, r)])
            }
            _ => obj.parse()?,
        };
        return Ok(Expansion::Q(q.series(d_free, order * d_free)?));
    }
    Err(Error::UnknownObject(object.into()))
}

/// Census counts for n = 1..=n_max.
pub fn oracle(family: &str, n_max: u32, format: Format) -> Result<String, Error> {
    let f = family_from_tag(family).ok_or_else(|| Error::UnknownObject(family.into()))?;
    let table = census_table(f, n_max)?;
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("n,count\n");
            for (n, c) in table {
                s.push_str(&format!("{n},{c}\n"));
            }
            s
        }
        Format::Json => serde_json::to_string(&table).expect("table serializes"),
    })
}
