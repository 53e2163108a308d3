//! File formats: the reaction spec document (JSON), the terrace descriptor
//! (JSON), and the CSV dumps. All floats are written with 17 significant
//! digits, which round-trips `f64` exactly; serializing a validated spec is
//! canonical (same input file, same bytes out).

use crate::phase_plane::Trajectory;
use crate::profile::Profile;
use crate::reaction::{ReactionBuilder, ReactionError, ReactionSpec, Stability};
use crate::terrace::Terrace;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error("malformed table: {0}")]
    Table(String),
}

/// 17-significant-digit decimal, the canonical float form.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Deserialize)]
struct SteadyStateRow {
    value: f64,
    stability: String,
}

#[derive(Debug, Deserialize)]
struct SegmentRow {
    from: f64,
    to: f64,
    poly: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct ReactionFile {
    steady_states: Vec<SteadyStateRow>,
    segments: Vec<SegmentRow>,
    extension_below: Vec<f64>,
    extension_above: Vec<f64>,
}

/// Parse a reaction spec document and validate it.
pub fn parse_reaction(text: &str) -> Result<ReactionSpec<f64>, IoError> {
    let file: ReactionFile = serde_json::from_str(text)?;
    let steady_states = file
        .steady_states
        .into_iter()
        .map(|row| {
            let stability = match row.stability.as_str() {
                "stable" => Ok(Stability::Stable),
                "unstable" => Ok(Stability::Unstable),
                other => Err(IoError::Json(serde::de::Error::custom(format!(
                    "unknown stability {other:?} (expected \"stable\" or \"unstable\")"
                )))),
            }?;
            Ok((row.value, stability))
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let segments = file
        .segments
        .into_iter()
        .map(|row| (row.from, row.to, row.poly))
        .collect();
    let builder = ReactionBuilder {
        steady_states,
        segments,
        extension_below: file.extension_below,
        extension_above: file.extension_above,
    };
    Ok(builder.validate()?)
}

fn float_array(xs: &[f64]) -> String {
    let inner: Vec<String> = xs.iter().map(|&x| fmt_g17(x)).collect();
    format!("[{}]", inner.join(", "))
}

/// Canonical serialization of a validated spec.
pub fn write_reaction(spec: &ReactionSpec<f64>) -> String {
    let mut out = String::from("{\n  \"steady_states\": [\n");
    for (k, s) in spec.steady_states().iter().enumerate() {
        let stab = match s.stability {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        };
        out.push_str(&format!(
            "    {{\"value\": {}, \"stability\": \"{stab}\"}}{}\n",
            fmt_g17(s.value),
            if k + 1 < spec.steady_states().len() { "," } else { "" }
        ));
    }
    out.push_str("  ],\n  \"segments\": [\n");
    let n_seg = spec.segments().len();
    for (k, (lo, hi, poly)) in spec.segments().iter().enumerate() {
        out.push_str(&format!(
            "    {{\"from\": {}, \"to\": {}, \"poly\": {}}}{}\n",
            fmt_g17(*lo),
            fmt_g17(*hi),
            float_array(poly.coeffs()),
            if k + 1 < n_seg { "," } else { "" }
        ));
    }
    out.push_str(&format!(
        "  ],\n  \"extension_below\": {},\n  \"extension_above\": {}\n}}\n",
        float_array(spec.extension_below().coeffs()),
        float_array(spec.extension_above().coeffs())
    ));
    out
}

/// `p,q` rows in decreasing `p`.
pub fn trajectory_csv(t: &Trajectory<f64>) -> String {
    let mut out = String::from("p,q\n");
    for &(p, q) in &t.samples {
        out.push_str(&format!("{},{}\n", fmt_g17(p), fmt_g17(q)));
    }
    out
}

/// `z,phi` rows in increasing `z`.
pub fn profile_csv(p: &Profile<f64>) -> String {
    let mut out = String::from("z,phi\n");
    for &(z, phi) in &p.samples {
        out.push_str(&format!("{},{}\n", fmt_g17(z), fmt_g17(phi)));
    }
    out
}

/// `x,u` rows.
pub fn snapshot_csv(x: &[f64], u: &[f64]) -> String {
    let mut out = String::from("x,u\n");
    for (&xi, &ui) in x.iter().zip(u) {
        out.push_str(&format!("{},{}\n", fmt_g17(xi), fmt_g17(ui)));
    }
    out
}

/// `t,x_level` rows.
pub fn track_csv(series: &[(f64, f64)]) -> String {
    let mut out = String::from("t,x_level\n");
    for &(t, x) in series {
        out.push_str(&format!("{},{}\n", fmt_g17(t), fmt_g17(x)));
    }
    out
}

/// Terrace descriptor; `profile_csv` names are the caller's relative paths.
pub fn terrace_json(
    terrace: &Terrace<f64>,
    widths: &[f64],
    profile_files: &[String],
) -> String {
    let platforms: Vec<String> = terrace
        .platforms()
        .iter()
        .map(|&p| fmt_g17(p))
        .collect();
    let mut out = format!("{{\n  \"platforms\": [{}],\n  \"fronts\": [\n", platforms.join(", "));
    let n = terrace.fronts.len();
    for (k, f) in terrace.fronts.iter().enumerate() {
        out.push_str(&format!(
            "    {{\"upper\": {}, \"lower\": {}, \"speed\": {}, \"support_width\": {}, \"profile_csv\": \"{}\"}}{}\n",
            fmt_g17(f.upper),
            fmt_g17(f.lower),
            fmt_g17(f.speed),
            fmt_g17(widths[k]),
            profile_files[k],
            if k + 1 < n { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

/// Two-column CSV (or whitespace-separated) table of `(x, u)` rows, used for
/// table initial conditions.
pub fn parse_xy_table(text: &str) -> Result<Vec<(f64, f64)>, IoError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(IoError::Table(format!("line {}: expected 2 columns", lineno + 1)));
        }
        // skip a header row
        if lineno == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        let x: f64 = fields[0]
            .parse()
            .map_err(|e| IoError::Table(format!("line {}: {e}", lineno + 1)))?;
        let u: f64 = fields[1]
            .parse()
            .map_err(|e| IoError::Table(format!("line {}: {e}", lineno + 1)))?;
        rows.push((x, u));
    }
    if rows.len() < 2 {
        return Err(IoError::Table("need at least two rows".into()));
    }
    Ok(rows)
}
