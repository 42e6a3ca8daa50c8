//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CowTable,
    TransportFermion,
    TransportPhoton,
    Measure,
    Teleport,
    QrfDecohere,
    QrfOverlap,
    Bhd,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::CowTable,
        Command::TransportFermion,
        Command::TransportPhoton,
        Command::Measure,
        Command::Teleport,
        Command::QrfDecohere,
        Command::QrfOverlap,
        Command::Bhd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CowTable => "cow-table",
            Command::TransportFermion => "transport-fermion",
            Command::TransportPhoton => "transport-photon",
            Command::Measure => "measure",
            Command::Teleport => "teleport",
            Command::QrfDecohere => "qrf-decohere",
            Command::QrfOverlap => "qrf-overlap",
            Command::Bhd => "bhd",
        }
    }

    /// Every accepted key with its default.
    pub fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Command::CowTable => &[
                ("mass", "1.67e-27"),
                ("speed_v1", "2794"),
                ("delta_z", "0.0316"),
                ("ell", "0.0316"),
                ("g", "9.81"),
                ("precision_digits", "50"),
            ],
            Command::TransportFermion => &[
                ("metric", "minkowski"),
                ("metric_param", "1"),
                ("trajectory", "geodesic"),
                ("x0", "0,0,0,0"),
                ("velocity", "0,0,0"),
                ("tau_end", "1"),
                ("steps", "1000"),
                ("beta", "0.5"),
                ("radius", "1"),
                ("revolutions", "1"),
                ("omega", "0.9"),
                ("spinor", "1,0,0,0"),
                ("scheme", "magnus4"),
            ],
            Command::TransportPhoton => &[
                ("metric", "minkowski"),
                ("metric_param", "1"),
                ("x0", "0,0,0,0"),
                ("direction", "0,0,1"),
                ("lambda_end", "1"),
                ("steps", "1000"),
                ("jones", "1,0,0,0"),
            ],
            Command::Measure => &[
                ("spinor", "1,0,0,0"),
                ("qubit_velocity", "0,0,0"),
                ("apparatus_velocity", "0,0,0"),
                ("orientation", "0,0,1"),
                ("shots", "0"),
                ("seed", "1"),
            ],
            Command::Teleport => &[
                ("alpha", "1,0"),
                ("beta", "0,0"),
                ("steps", "3000"),
                ("skip_basis", "none"),
                ("seed", "1"),
            ],
            Command::QrfDecohere => &[
                ("group", "u1"),
                ("frame", "phase"),
                ("s", "8"),
                ("amplitude", "2"),
                ("two_j", "8"),
                ("quadrature", "0"),
            ],
            Command::QrfOverlap => &[
                ("kind", "u1_phase"),
                ("s", "4"),
                ("two_j", "8"),
                ("points", "65"),
            ],
            Command::Bhd => &[
                ("frame_a", "coherent"),
                ("frame_b", "coherent"),
                ("size_a", "2"),
                ("size_b", "2"),
                ("angle_a", "0"),
                ("angle_b", "0"),
            ],
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Resolved parameters for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
    pub output_path: Option<String>,
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_flat(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}", n + 1), "expected `key = value`"))?;
        let k = k.trim().to_string();
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(CliError::config(&k, "given twice"));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// `--key value` pairs, in order.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a
            .strip_prefix("--")
            .ok_or_else(|| CliError::config(a, "expected `--key value`"))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            continue;
        }
        let v = it
            .next()
            .ok_or_else(|| CliError::config(key, "missing value"))?;
        out.push((key.to_string(), v.clone()));
    }
    Ok(out)
}

impl RunConfig {
    /// Defaults, then the file, then overrides. `config` and `output` may appear
    /// in either layer; any other key must be one the command knows.
    pub fn resolve(command: Command, layers: &[Vec<(String, String)>]) -> Result<Self, CliError> {
        let mut params: BTreeMap<String, String> = command
            .defaults()
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut output_path = None;
        for layer in layers {
            for (k, v) in layer {
                match k.as_str() {
                    "output" => output_path = Some(v.clone()),
                    "config" => {}
                    _ if params.contains_key(k) => {
                        params.insert(k.clone(), v.clone());
                    }
                    _ => {
                        return Err(CliError::config(
                            k,
                            format!("unknown key for {}", command.name()),
                        ))
                    }
                }
            }
        }
        Ok(RunConfig {
            command,
            params,
            output_path,
        })
    }

    pub fn raw(&self, key: &str) -> &str {
        self.params
            .get(key)
            .map(String::as_str)
            .expect("key declared in defaults")
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .parse()
            .map_err(|e: T::Err| CliError::config(key, e.to_string()))
    }

    /// Comma-separated list of exactly `n` numbers.
    pub fn list(&self, key: &str, n: usize) -> Result<Vec<f64>, CliError> {
        let v: Vec<f64> = self
            .raw(key)
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::config(key, e.to_string()))?;
        if v.len() != n {
            return Err(CliError::config(
                key,
                format!("expected {n} comma-separated numbers, found {}", v.len()),
            ));
        }
        Ok(v)
    }

    /// One of the listed choices.
    pub fn choice<'a>(&self, key: &str, options: &[&'a str]) -> Result<&'a str, CliError> {
        let v = self.raw(key);
        options.iter().find(|o| **o == v).copied().ok_or_else(|| {
            CliError::config(key, format!("`{v}` is not one of {}", options.join(", ")))
        })
    }

    /// Manifest echoing the command and every resolved parameter.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command.name());
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k} = {v}");
        }
        if let Some(o) = &self.output_path {
            let _ = writeln!(s, "output = {o}");
        }
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        s
    }
}
