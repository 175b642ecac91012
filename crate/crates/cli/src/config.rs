//! TOML sweep documents.
//!
//! ```toml
//! label = "fig2"
//! R = 5
//! d = [0, 10]
//! Omega = [0.5, 1, 5, 10]
//! t_max = 20
//! ```
//!
//! `R`, `delta`, `d` and `Omega` take a number or a list; the sweep is their
//! cartesian product. Everything else is a scalar.

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qbattery::{ModelParams, SolverConfig};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, CliResult};
use crate::presets;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_VAR: &str = "QBATTERY_OUT";
pub const DEFAULT_OUTPUT_ROOT: &str = "qbattery-out";
pub const DEFAULT_GRID_CAP: usize = 10_000;

/// One sweep axis: a single number or a list.
#[derive(Debug, Clone, PartialEq)]
struct Axis(Vec<f64>);

impl<'de> Deserialize<'de> for Axis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AxisVisitor;

        impl<'de> Visitor<'de> for AxisVisitor {
            type Value = Axis;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a list of numbers")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Axis, E> {
                Ok(Axis(vec![v]))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Axis, E> {
                Ok(Axis(vec![v as f64]))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Axis, E> {
                Ok(Axis(vec![v as f64]))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Axis, A::Error> {
                let mut values = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    values.push(v);
                }
                Ok(Axis(values))
            }
        }

        deserializer.deserialize_any(AxisVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "R")]
    rabi: Option<Spanned<Axis>>,
    delta: Option<Spanned<Axis>>,
    d: Option<Spanned<Axis>>,
    #[serde(rename = "Omega")]
    omega: Option<Spanned<Axis>>,
    r1: Option<Spanned<f64>>,
    c01_re: Option<Spanned<f64>>,
    c01_im: Option<Spanned<f64>>,
    c02_re: Option<Spanned<f64>>,
    c02_im: Option<Spanned<f64>>,
    t_max: Option<Spanned<f64>>,
    dt_out: Option<Spanned<f64>>,
    rel_tol: Option<Spanned<f64>>,
    abs_tol: Option<Spanned<f64>>,
    quadrature_dt: Option<Spanned<f64>>,
    output_dir: Option<Spanned<String>>,
    label: Option<Spanned<String>>,
}

/// A validated sweep: the cartesian product of the four axes around `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Couplings and initial amplitudes shared by every point; its `rabi`,
    /// `detuning` and modulation fields are overridden per grid point.
    pub base: ModelParams,
    pub rabi: Vec<f64>,
    pub delta: Vec<f64>,
    pub d: Vec<f64>,
    pub omega: Vec<f64>,
    pub cfg: SolverConfig,
    pub output_dir: PathBuf,
    pub label: String,
    pub grid_cap: usize,
}

impl SweepSpec {
    /// Grid points sorted by `(R, δ, d, Ω)`. Points with `d = 0` collapse to
    /// `Ω = 0` so that "modulation off" appears once per `(R, δ)`.
    pub fn grid(&self) -> qbattery::Result<Vec<ModelParams>> {
        let axis = |values: &[f64], fallback: f64| {
            if values.is_empty() {
                vec![fallback]
            } else {
                values.to_vec()
            }
        };
        let rabi = axis(&self.rabi, self.base.rabi);
        let delta = axis(&self.delta, self.base.detuning);
        let d = axis(&self.d, self.base.mod_amplitude);
        let omega = axis(&self.omega, self.base.mod_frequency);

        let size = rabi.len() * delta.len() * d.len() * omega.len();
        if size > self.grid_cap {
            return Err(qbattery::Error::Validation(format!(
                "grid has {size} points, more than the cap of {}",
                self.grid_cap
            )));
        }

        let mut points = Vec::with_capacity(size);
        for &r in &rabi {
            for &dl in &delta {
                for &amp in &d {
                    for &om in &omega {
                        let om = if amp == 0.0 { 0.0 } else { om };
                        let p = ModelParams {
                            rabi: r,
                            detuning: dl,
                            mod_amplitude: amp,
                            mod_frequency: om,
                            ..self.base
                        };
                        p.validate()?;
                        points.push(p);
                    }
                }
            }
        }
        points.sort_by(|a, b| grid_key(a).partial_cmp(&grid_key(b)).expect("validated values are finite"));
        points.dedup_by(|a, b| grid_key(a) == grid_key(b));
        Ok(points)
    }
}

pub fn grid_key(p: &ModelParams) -> [f64; 4] {
    [p.rabi, p.detuning, p.mod_amplitude, p.mod_frequency]
}

/// `$QBATTERY_OUT`, or `qbattery-out` in the working directory.
pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
    source_name: &'a str,
}

impl Ctx<'_> {
    fn error<T>(&self, key: &str, span: std::ops::Range<usize>, message: impl fmt::Display) -> CliResult<T> {
        Err(CliError::Parse {
            source_name: self.source_name.to_string(),
            message: format!("line {}: key `{key}`: {message}", line_of(self.text, span.start)),
        })
    }

    fn axis(&self, key: &str, value: Option<Spanned<Axis>>, check: impl Fn(f64) -> bool, rule: &str) -> CliResult<Vec<f64>> {
        let Some(value) = value else { return Ok(Vec::new()) };
        let span = value.span();
        let values = value.into_inner().0;
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && check(**v))) {
            return self.error(key, span, format!("{bad} is not {rule}"));
        }
        Ok(values)
    }

    fn scalar(&self, key: &str, value: Option<Spanned<f64>>, default: f64, check: impl Fn(f64) -> bool, rule: &str) -> CliResult<f64> {
        let Some(value) = value else { return Ok(default) };
        let span = value.span();
        let v = value.into_inner();
        if !(v.is_finite() && check(v)) {
            return self.error(key, span, format!("{v} is not {rule}"));
        }
        Ok(v)
    }
}

/// Parses a sweep document. `source_name` labels error messages and is the
/// default `label`.
pub fn parse_config(text: &str, source_name: &str) -> CliResult<SweepSpec> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse {
        source_name: source_name.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let ctx = Ctx { text, source_name };

    let rabi_span = raw.rabi.as_ref().map(|v| v.span());
    let omega_span = raw.omega.as_ref().map(|v| v.span()).or(raw.d.as_ref().map(|v| v.span()));

    let rabi = ctx.axis("R", raw.rabi, |v| v > 0.0, "a positive number")?;
    if rabi.is_empty() {
        return Err(CliError::Parse {
            source_name: source_name.to_string(),
            message: "missing required key `R`".into(),
        });
    }
    let delta = ctx.axis("delta", raw.delta, |_| true, "finite")?;
    let d = ctx.axis("d", raw.d, |_| true, "finite")?;
    let omega = ctx.axis("Omega", raw.omega, |v| v >= 0.0, "a non-negative number")?;

    let r1 = ctx.scalar("r1", raw.r1, std::f64::consts::FRAC_1_SQRT_2, |v| (0.0..=1.0).contains(&v), "in [0, 1]")?;
    let c_span = [&raw.c01_re, &raw.c01_im, &raw.c02_re, &raw.c02_im]
        .iter()
        .find_map(|v| v.as_ref().map(|s| s.span()));
    let any = |_: f64| true;
    let c01 = Complex64::new(
        ctx.scalar("c01_re", raw.c01_re, 1.0, any, "finite")?,
        ctx.scalar("c01_im", raw.c01_im, 0.0, any, "finite")?,
    );
    let c02 = Complex64::new(
        ctx.scalar("c02_re", raw.c02_re, 0.0, any, "finite")?,
        ctx.scalar("c02_im", raw.c02_im, 0.0, any, "finite")?,
    );

    let defaults = SolverConfig::default();
    let positive = |v: f64| v > 0.0;
    let cfg = SolverConfig {
        t_max: ctx.scalar("t_max", raw.t_max, defaults.t_max, positive, "positive")?,
        dt_out: ctx.scalar("dt_out", raw.dt_out, defaults.dt_out, positive, "positive")?,
        rel_tol: ctx.scalar("rel_tol", raw.rel_tol, defaults.rel_tol, positive, "positive")?,
        abs_tol: ctx.scalar("abs_tol", raw.abs_tol, defaults.abs_tol, positive, "positive")?,
        quadrature_dt: ctx.scalar("quadrature_dt", raw.quadrature_dt, defaults.quadrature_dt, positive, "positive")?,
        ..defaults
    };
    if let Err(e) = cfg.validate() {
        return Err(CliError::Parse {
            source_name: source_name.to_string(),
            message: format!("solver settings: {e}"),
        });
    }

    let label = match raw.label {
        Some(l) if l.get_ref().trim().is_empty() => return ctx.error("label", l.span(), "must not be empty"),
        Some(l) => l.into_inner(),
        None => source_name.to_string(),
    };
    let output_dir = match raw.output_dir {
        Some(dir) => PathBuf::from(dir.into_inner()),
        None => default_output_root().join(sanitize(&label)),
    };

    let base = ModelParams::new(rabi[0]).with_r1(r1).with_initial(c01, c02);
    if let Err(e) = base.validate() {
        let span = c_span.unwrap_or(0..0);
        return ctx.error("c01_re/c01_im/c02_re/c02_im", span, e);
    }

    let spec = SweepSpec {
        base,
        rabi,
        delta,
        d,
        omega,
        cfg,
        output_dir,
        label,
        grid_cap: DEFAULT_GRID_CAP,
    };
    if let Err(e) = spec.grid() {
        let span = omega_span.or(rabi_span).unwrap_or(0..0);
        return ctx.error("Omega", span, e);
    }
    Ok(spec)
}

/// Reads `arg` as a preset name or a file path.
pub fn load_config(arg: &str) -> CliResult<SweepSpec> {
    if let Some(text) = presets::get(arg) {
        return parse_config(text, arg);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    parse_config(&text, stem)
}

/// Keeps a label usable as a file-name component.
pub fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}
