//! Optional JSON config bundle: one file carrying reaction path, tolerance
//! and simulator blocks, so an experiment can be reproduced from a single
//! document. Command-line flags override file values.

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub reaction: Option<String>,
    pub tolerances: Option<TolBlock>,
    pub pde: Option<PdeBlock>,
}

#[derive(Debug, Default, Clone)]
pub struct TolBlock {
    pub tol_ode: Option<f64>,
    pub tol_c: Option<f64>,
    pub tol_snap: Option<f64>,
    pub tol_profile: Option<f64>,
}

#[derive(Debug, Default, Clone)]
pub struct PdeBlock {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub dx: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub cfl_safety: Option<f64>,
    pub ic: Option<String>,
    pub gap: Option<f64>,
}

impl FileConfig {
    pub fn pde_dx(&self) -> Option<f64> {
        self.pde.as_ref().and_then(|p| p.dx)
    }
    pub fn pde_dt(&self) -> Option<f64> {
        self.pde.as_ref().and_then(|p| p.dt)
    }
    pub fn pde_t_final(&self) -> Option<f64> {
        self.pde.as_ref().and_then(|p| p.t_final)
    }
    pub fn pde_cfl(&self) -> Option<f64> {
        self.pde.as_ref().and_then(|p| p.cfl_safety)
    }
    pub fn pde_gap(&self) -> Option<f64> {
        self.pde.as_ref().and_then(|p| p.gap)
    }
    pub fn pde_ic(&self) -> Option<String> {
        self.pde.as_ref().and_then(|p| p.ic.clone())
    }
    pub fn pde_domain(&self) -> Option<(f64, f64)> {
        let p = self.pde.as_ref()?;
        Some((p.x_min?, p.x_max?))
    }
}

/// Hand-rolled extraction on top of serde_json's dynamic value, keeping the
/// CLI free of derive bounds for this tiny schema.
pub fn parse(text: &str) -> Result<FileConfig, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("config must be a JSON object")?;
    let mut out = FileConfig::default();
    if let Some(r) = obj.get("reaction") {
        out.reaction = Some(
            r.as_str()
                .ok_or("\"reaction\" must be a path string")?
                .to_string(),
        );
    }
    if let Some(t) = obj.get("tolerances") {
        let t = t.as_object().ok_or("\"tolerances\" must be an object")?;
        out.tolerances = Some(TolBlock {
            tol_ode: num(t, "tol_ode")?,
            tol_c: num(t, "tol_c")?,
            tol_snap: num(t, "tol_snap")?,
            tol_profile: num(t, "tol_profile")?,
        });
    }
    if let Some(p) = obj.get("pde") {
        let p = p.as_object().ok_or("\"pde\" must be an object")?;
        out.pde = Some(PdeBlock {
            x_min: num(p, "x_min")?,
            x_max: num(p, "x_max")?,
            dx: num(p, "dx")?,
            dt: num(p, "dt")?,
            t_final: num(p, "t_final")?,
            cfl_safety: num(p, "cfl_safety")?,
            ic: p.get("ic").and_then(|v| v.as_str()).map(str::to_string),
            gap: num(p, "gap")?,
        });
    }
    Ok(out)
}

fn num(
    obj: &serde_json::Map<String, serde_json::Value>,
    key: &str,
) -> Result<Option<f64>, String> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| format!("\"{key}\" must be a number")),
    }
}
