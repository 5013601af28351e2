//! Refinement studies and epsilon sweeps rendered as CSV tables.
//!
//! Every command builds one [`StokesSystem`] per `(element, n)` cell, runs the
//! cells on the rayon pool and emits rows in the canonical order of the config
//! (elements, then levels, then eps or variant and field), so output does not depend
//! on scheduling. Numbers use 12 significant digits.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::fem::{AnalyticField, ElementPair, StokesSystem};
use crate::infsup::{
    c_fit, fortin_diagnostics, glbb_constant, glbb_full_h1, inverse_constants, lbb_constant, lbb_full_h1,
    weighted_constant, FortinProjector, FortinVariant, InfSupError,
};
use crate::mesh::{build_structured_mesh, Pattern};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_EPS: [f64; 5] = [1e-4, 1e-3, 1e-2, 1e-1, 1.0];
/// Extra eps values at which the weighted constant is compared with its limits.
pub const LIMIT_PROBES: [f64; 2] = [1e-6, 1e3];
/// Random pressures per level for `c_fit`.
pub const FIT_PROBES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TestField {
    VStar,
    WStar,
    /// Nodal interpolant of `w_star` in the velocity space, lifted back as a field.
    Interpolant,
}

impl TestField {
    pub const ALL: [TestField; 3] = [TestField::VStar, TestField::WStar, TestField::Interpolant];

    pub fn name(self) -> &'static str {
        match self {
            TestField::VStar => "v_star",
            TestField::WStar => "w_star",
            TestField::Interpolant => "interpolant",
        }
    }

    pub fn build(self, sys: &StokesSystem) -> AnalyticField {
        match self {
            TestField::VStar => AnalyticField::v_star(),
            TestField::WStar => AnalyticField::w_star(),
            TestField::Interpolant => {
                let w = AnalyticField::w_star();
                let uh = sys.xh.interpolate(|p| w.value(p));
                AnalyticField::from_fe(&sys.xh, &uh, "interpolant")
            }
        }
    }
}

impl fmt::Display for TestField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "v_star" | "vstar" => Ok(TestField::VStar),
            "w_star" | "wstar" => Ok(TestField::WStar),
            "interpolant" => Ok(TestField::Interpolant),
            other => Err(format!("unknown test field '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub elements: Vec<ElementPair>,
    pub pattern: Pattern,
    /// Ascending subdivision counts.
    pub levels: Vec<usize>,
    pub eps_grid: Vec<f64>,
    /// Append [`LIMIT_PROBES`] to the eps sweep.
    pub limit_probes: bool,
    pub fields: Vec<TestField>,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            elements: ElementPair::ALL.to_vec(),
            pattern: Pattern::Diagonal,
            levels: vec![4, 8, 16, 32],
            eps_grid: DEFAULT_EPS.to_vec(),
            limit_probes: false,
            fields: vec![TestField::VStar],
            seed: DEFAULT_SEED,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.elements.is_empty() {
            return Err("no elements selected".into());
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return Err("levels must be nonempty and positive".into());
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err("levels must be strictly ascending".into());
        }
        if let Some(e) = self.eps_grid.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(format!("eps values must be positive, got {e}"));
        }
        Ok(())
    }
}

/// Cell status: `ok`, a flagged degeneracy, or an outright failure.
#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    Singular,
    Hypothesis(&'static str),
    Failed(String),
}

impl Status {
    fn from_error(e: &InfSupError) -> Self {
        match e {
            InfSupError::HypothesisViolated(h) => Status::Hypothesis(h),
            other => Status::Failed(other.to_string()),
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Failed(_))
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Singular => f.write_str("singular"),
            Status::Hypothesis(h) => write!(f, "{h} hypothesis violated at this level"),
            Status::Failed(msg) => write!(f, "failed: {}", msg.replace([',', '\n'], ";")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// True when any cell failed outright.
    pub failed: bool,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }
}

/// 12 significant digits; empty for a missing value.
pub fn fmt_num(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.11e}"),
        None => String::new(),
    }
}

fn cells(config: &StudyConfig) -> Vec<(ElementPair, usize)> {
    config
        .elements
        .iter()
        .flat_map(|&e| config.levels.iter().map(move |&n| (e, n)))
        .collect()
}

fn build(config: &StudyConfig, pair: ElementPair, n: usize) -> Result<StokesSystem, Status> {
    let mesh = build_structured_mesh(n, config.pattern).map_err(|e| Status::Failed(e.to_string()))?;
    StokesSystem::new(Arc::new(mesh), pair).map_err(|e| Status::Failed(e.to_string()))
}

fn finish(header: Vec<&'static str>, groups: Vec<Vec<(Vec<String>, Status)>>) -> Table {
    let mut failed = false;
    let rows = groups
        .into_iter()
        .flatten()
        .map(|(mut row, status)| {
            failed |= status.is_failure();
            row.push(status.to_string());
            row
        })
        .collect();
    Table { header, rows, failed }
}

pub const CONSTANTS_HEADER: [&str; 10] = [
    "element", "pattern", "n", "h", "beta_lbb", "c_glbb", "c_inv_v", "c_inv_p", "c_fit", "status",
];

/// One row per `(element, n)`: LBB, GLBB, inverse-inequality constants and the
/// fitted constant of the local-gradient inequality.
pub fn cmd_constants(config: &StudyConfig) -> Table {
    let groups = cells(config)
        .into_par_iter()
        .map(|(pair, n)| {
            let mut row = vec![pair.to_string(), config.pattern.to_string(), n.to_string()];
            let sys = match build(config, pair, n) {
                Ok(s) => s,
                Err(status) => {
                    row.extend(std::iter::repeat_n(String::new(), 6));
                    return vec![(row, status)];
                }
            };
            let result = (|| -> Result<_, InfSupError> {
                let lbb = lbb_constant(&sys)?;
                let glbb = glbb_constant(&sys)?;
                let inv = inverse_constants(&sys)?;
                let fit = c_fit(&sys, FIT_PROBES, config.seed)?;
                Ok((lbb, glbb, inv, fit))
            })();
            let status = match &result {
                Ok((l, g, _, _)) if l.singular || g.singular => Status::Singular,
                Ok(_) => Status::Ok,
                Err(e) => Status::from_error(e),
            };
            row.push(fmt_num(Some(sys.h())));
            match result {
                Ok((l, g, inv, fit)) => row.extend([
                    fmt_num(Some(l.value)),
                    fmt_num(Some(g.value)),
                    fmt_num(Some(inv.velocity)),
                    fmt_num(Some(inv.pressure)),
                    fmt_num(Some(fit)),
                ]),
                Err(_) => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
            vec![(row, status)]
        })
        .collect();
    finish(CONSTANTS_HEADER.to_vec(), groups)
}

pub const EPS_HEADER: [&str; 7] = ["element", "pattern", "n", "eps", "c_eps", "limit_reference", "status"];

/// One row per `(element, n, eps)`. Limit probes carry the constant they should
/// approach: LBB with the full H1 velocity norm for large eps, GLBB with the
/// full H1 pressure norm for small eps.
pub fn cmd_eps_sweep(config: &StudyConfig) -> Table {
    let mut grid: Vec<(f64, bool)> = config.eps_grid.iter().map(|&e| (e, false)).collect();
    if config.limit_probes {
        grid.extend(LIMIT_PROBES.iter().map(|&e| (e, true)));
    }
    let groups = cells(config)
        .into_par_iter()
        .map(|(pair, n)| {
            let prefix = vec![pair.to_string(), config.pattern.to_string(), n.to_string()];
            let sys = build(config, pair, n);
            grid.par_iter()
                .map(|&(eps, probe)| {
                    let mut row = prefix.clone();
                    row.push(fmt_num(Some(eps)));
                    let sys = match &sys {
                        Ok(s) => s,
                        Err(status) => {
                            row.extend([String::new(), String::new()]);
                            return (row, status.clone());
                        }
                    };
                    let reference = if !probe {
                        Ok(None)
                    } else if eps >= 1.0 {
                        lbb_full_h1(sys).map(|c| Some(c.value))
                    } else {
                        glbb_full_h1(sys).map(|c| Some(c.value))
                    };
                    match weighted_constant(sys, eps).and_then(|c| Ok((c, reference?))) {
                        Ok((c, r)) => {
                            row.extend([fmt_num(Some(c.value)), fmt_num(r)]);
                            (row, if c.singular { Status::Singular } else { Status::Ok })
                        }
                        Err(e) => {
                            row.extend([String::new(), String::new()]);
                            (row, Status::from_error(&e))
                        }
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    finish(EPS_HEADER.to_vec(), groups)
}

pub const FORTIN_HEADER: [&str; 13] = [
    "element",
    "pattern",
    "n",
    "field",
    "variant",
    "l2_error",
    "fl2_ratio",
    "fh1_ratio",
    "h1_seminorm_ratio",
    "orthogonality_residual",
    "idempotence_gap",
    "solve_residual",
    "status",
];

/// One row per `(element, n, field, variant)`.
pub fn cmd_fortin_study(config: &StudyConfig) -> Table {
    let groups = cells(config)
        .into_par_iter()
        .map(|(pair, n)| {
            let sys = build(config, pair, n);
            let mut rows = Vec::new();
            for variant in FortinVariant::ALL {
                let projector = sys
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|s| FortinProjector::new(s, variant).map_err(|e| Status::from_error(&e)));
                for &field in &config.fields {
                    let mut row = vec![
                        pair.to_string(),
                        config.pattern.to_string(),
                        n.to_string(),
                        field.to_string(),
                        variant.to_string(),
                    ];
                    let outcome = projector.as_ref().map_err(Clone::clone).and_then(|p| {
                        let f = field.build(sys.as_ref().unwrap());
                        p.apply(&f)
                            .and_then(|r| fortin_diagnostics(p, &f, &r))
                            .map_err(|e| Status::from_error(&e))
                    });
                    match outcome {
                        Ok(d) => {
                            row.extend(
                                [
                                    d.l2_error,
                                    d.fl2_ratio,
                                    d.fh1_ratio,
                                    d.h1_seminorm_ratio,
                                    d.orthogonality_residual,
                                    d.idempotence_gap,
                                    d.solve_residual,
                                ]
                                .map(|v| fmt_num(Some(v))),
                            );
                            rows.push((row, Status::Ok));
                        }
                        Err(status) => {
                            row.extend(std::iter::repeat_n(String::new(), 7));
                            rows.push((row, status));
                        }
                    }
                }
            }
            rows
        })
        .collect();
    finish(FORTIN_HEADER.to_vec(), groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> StudyConfig {
        StudyConfig {
            elements: vec![ElementPair::TaylorHood],
            levels: vec![4, 8],
            ..StudyConfig::default()
        }
    }

    #[test]
    fn constants_rows_and_h() {
        let t = cmd_constants(&small());
        assert_eq!(t.rows.len(), 2);
        let h = t.column("h").unwrap();
        let expect = [2f64.sqrt() / 4.0, 2f64.sqrt() / 8.0];
        for (row, e) in t.rows.iter().zip(expect) {
            assert!((row[h].parse::<f64>().unwrap() - e).abs() < 1e-11);
            assert_eq!(row.last().unwrap(), "ok");
        }
        assert!(!t.failed);
    }

    #[test]
    fn eps_sweep_cardinality_and_probes() {
        let mut c = small();
        c.levels = vec![2, 3, 4, 5];
        assert_eq!(cmd_eps_sweep(&c).rows.len(), 20);
        c.limit_probes = true;
        let t = cmd_eps_sweep(&c);
        assert_eq!(t.rows.len(), 28);
        let refs = t.rows.iter().filter(|r| !r[5].is_empty()).count();
        assert_eq!(refs, 8);
    }

    #[test]
    fn singular_levels_are_flagged_not_failed() {
        let c = StudyConfig {
            elements: vec![ElementPair::EqualOrder],
            levels: vec![4],
            fields: vec![TestField::WStar],
            ..StudyConfig::default()
        };
        let t = cmd_constants(&c);
        assert_eq!(t.rows[0].last().unwrap(), "singular");
        let t = cmd_fortin_study(&c);
        assert_eq!(t.rows[0].last().unwrap(), "GLBB hypothesis violated at this level");
        assert_eq!(t.rows[1].last().unwrap(), "LBB hypothesis violated at this level");
        assert!(!t.failed);
    }

    #[test]
    fn validation() {
        let mut c = small();
        c.levels = vec![8, 4];
        assert!(c.validate().is_err());
        c = small();
        c.eps_grid = vec![0.0];
        assert!(c.validate().is_err());
        assert!(small().validate().is_ok());
    }

    #[test]
    fn csv_has_header_and_fixed_format() {
        let csv = cmd_constants(&small()).to_csv();
        assert!(csv.starts_with("element,pattern,n,h,beta_lbb"));
        assert!(csv.ends_with('\n'));
        assert_eq!(fmt_num(Some(0.5)), "5.00000000000e-1");
    }
}
