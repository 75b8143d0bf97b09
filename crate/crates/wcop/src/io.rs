//! JSON interchange: instance files, matrices and the two report formats.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use wcop_core::classify::{
    ClassVerdict, ClassificationReport, CriterionVerdict, Finding, FindingKind,
};
use wcop_core::spectra::SpectrumReport;
use wcop_core::{
    Complex64, ComplexMatrix, FiniteMeasureSpace, MeasurableFn, Partition, WeightedCondOp,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("invalid `{field}`: {source}")]
    Invalid {
        field: &'static str,
        source: wcop_core::Error,
    },
}

/// Real and imaginary parts of a complex vector; `im` defaults to zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexVec {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

impl ComplexVec {
    pub fn from_values(values: &[Complex64]) -> Self {
        let im: Vec<f64> = values.iter().map(|z| z.im).collect();
        Self {
            re: values.iter().map(|z| z.re).collect(),
            im: im.iter().any(|&x| x != 0.0).then_some(im),
        }
    }

    fn to_fn(&self, field: &'static str) -> Result<MeasurableFn, IoError> {
        match &self.im {
            None => Ok(MeasurableFn::from_real(&self.re)),
            Some(im) => MeasurableFn::from_parts(&self.re, im)
                .map_err(|source| IoError::Invalid { field, source }),
        }
    }
}

/// On-disk instance: masses, atoms as lists of point indices, and the two
/// weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDto {
    pub mass: Vec<f64>,
    pub atoms: Vec<Vec<usize>>,
    pub u: ComplexVec,
    pub w: ComplexVec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl InstanceDto {
    pub fn from_op(op: &WeightedCondOp) -> Self {
        Self {
            mass: op.space().mass().to_vec(),
            atoms: op.partition().atoms().to_vec(),
            u: ComplexVec::from_values(op.u().values()),
            w: ComplexVec::from_values(op.w().values()),
            labels: op.space().labels().map(<[String]>::to_vec),
        }
    }

    pub fn to_op(&self) -> Result<WeightedCondOp, IoError> {
        let invalid = |field| move |source| IoError::Invalid { field, source };
        let mut space = FiniteMeasureSpace::new(self.mass.clone()).map_err(invalid("mass"))?;
        if let Some(labels) = &self.labels {
            space = space
                .with_labels(labels.clone())
                .map_err(invalid("labels"))?;
        }
        let part = Partition::new(self.atoms.clone(), self.mass.len()).map_err(invalid("atoms"))?;
        let u = self.u.to_fn("u")?;
        let w = self.w.to_fn("w")?;
        if u.len() != self.mass.len() {
            return Err(invalid("u")(wcop_core::Error::ShapeMismatch {
                expected: self.mass.len(),
                found: u.len(),
            }));
        }
        if w.len() != self.mass.len() {
            return Err(invalid("w")(wcop_core::Error::ShapeMismatch {
                expected: self.mass.len(),
                found: w.len(),
            }));
        }
        WeightedCondOp::new(space, part, u, w).map_err(invalid("instance"))
    }
}

/// Deserializes with the path of the failing field in the error.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        IoError::Parse {
            field: if field == "." { "<root>".into() } else { field },
            message: e.into_inner().to_string(),
        }
    })
}

pub fn parse_instance(text: &str) -> Result<WeightedCondOp, IoError> {
    from_json::<InstanceDto>(text)?.to_op()
}

pub fn read_instance(path: &Path) -> Result<WeightedCondOp, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, to_json(value)).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDto {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixDto {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let entries = m.to_row_major();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, IoError> {
        let invalid = |found| IoError::Invalid {
            field: "im",
            source: wcop_core::Error::ShapeMismatch {
                expected: self.re.len(),
                found,
            },
        };
        if self.im.len() != self.re.len() {
            return Err(invalid(self.im.len()));
        }
        let entries = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, entries).map_err(|source| {
            IoError::Invalid {
                field: "re",
                source,
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDto {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDto {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDto {
    pub atom: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDto {
    pub class: String,
    pub p: Option<f64>,
    pub oracle: bool,
    pub criterion: String,
    pub kind: String,
    pub margin: f64,
    #[serde(rename = "oracleMargin")]
    pub oracle_margin: f64,
    pub consistent: bool,
    pub witnesses: Vec<WitnessDto>,
}

fn criterion_label(c: CriterionVerdict) -> &'static str {
    match c {
        CriterionVerdict::Holds => "holds",
        CriterionVerdict::Fails => "fails",
        CriterionVerdict::NotApplicable => "not_applicable",
    }
}

impl From<&ClassVerdict> for VerdictDto {
    fn from(v: &ClassVerdict) -> Self {
        Self {
            class: v.class.label().into(),
            p: v.class.exponent(),
            oracle: v.oracle,
            criterion: criterion_label(v.criterion).into(),
            kind: v.kind.label().into(),
            margin: v.margin,
            oracle_margin: v.oracle_margin,
            consistent: v.is_consistent(),
            witnesses: v
                .witnesses
                .iter()
                .map(|w| WitnessDto {
                    atom: w.atom,
                    point: w.point,
                    lhs: w.lhs,
                    rhs: w.rhs,
                    gap: w.gap,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingDto {
    pub kind: String,
    pub check: String,
    pub detail: String,
    pub value: Option<f64>,
}

impl From<&Finding> for FindingDto {
    fn from(f: &Finding) -> Self {
        Self {
            kind: match f.kind {
                FindingKind::Violation => "violation",
                FindingKind::Discrepancy => "discrepancy",
                FindingKind::Failure => "failure",
            }
            .into(),
            check: f.check.into(),
            detail: f.detail.clone(),
            value: f.value.is_finite().then_some(f.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub fingerprint: String,
    pub tol: f64,
    #[serde(rename = "pGrid")]
    pub p_grid: Vec<f64>,
    #[serde(rename = "maxPower")]
    pub max_power: usize,
    pub consistent: bool,
    pub verdicts: Vec<VerdictDto>,
    pub findings: Vec<FindingDto>,
    pub notes: Vec<String>,
}

impl From<&ClassificationReport> for ReportDto {
    fn from(r: &ClassificationReport) -> Self {
        Self {
            fingerprint: format!("{:016x}", r.fingerprint),
            tol: r.config.tol,
            p_grid: r.config.p_grid.clone(),
            max_power: r.config.max_power,
            consistent: r.is_consistent(),
            verdicts: r.verdicts.iter().map(VerdictDto::from).collect(),
            findings: r.findings.iter().map(FindingDto::from).collect(),
            notes: r.notes.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSpectrumDto {
    pub lambda: ComplexDto,
    pub atoms: Vec<usize>,
    pub mass: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDto {
    pub eigenvalues: Vec<ComplexDto>,
    #[serde(rename = "essRange")]
    pub ess_range: Vec<ComplexDto>,
    #[serde(rename = "pointSpectrum")]
    pub point_spectrum: Vec<PointSpectrumDto>,
    #[serde(rename = "jointPointSpectrum")]
    pub joint_point_spectrum: Vec<ComplexDto>,
    pub radius: f64,
    pub norm: f64,
    #[serde(rename = "aluthgeNorms")]
    pub aluthge_norms: Vec<f64>,
    #[serde(rename = "multisetMatch")]
    pub multiset_match: bool,
    #[serde(rename = "jointEquality")]
    pub joint_equality: Option<bool>,
    pub notes: Vec<String>,
}

impl From<&SpectrumReport> for SpectrumDto {
    fn from(r: &SpectrumReport) -> Self {
        let c = |v: &[Complex64]| v.iter().copied().map(ComplexDto::from).collect();
        Self {
            eigenvalues: c(&r.eigenvalues),
            ess_range: c(&r.ess_range),
            point_spectrum: r
                .point_spectrum
                .iter()
                .map(|e| PointSpectrumDto {
                    lambda: e.lambda.into(),
                    atoms: e.atoms.clone(),
                    mass: e.mass,
                    verified: e.verified,
                })
                .collect(),
            joint_point_spectrum: c(&r.joint_point_spectrum),
            radius: r.spectral_radius,
            norm: r.norm,
            aluthge_norms: r.aluthge_norms.clone(),
            multiset_match: r.multiset_match,
            joint_equality: r.joint_equality,
            notes: vec![wcop_core::spectra::APPROXIMATE_POINT_NOTE.to_string()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const W1: &str = r#"{"mass":[0.25,0.25,0.25,0.25],"atoms":[[0,1],[2,3]],
        "u":{"re":[1,1,2,2]},"w":{"re":[1,3,1,1]}}"#;

    #[test]
    fn instance_round_trip() {
        let op = parse_instance(W1).unwrap();
        assert_eq!(op.len(), 4);
        let dto = InstanceDto::from_op(&op);
        let again = from_json::<InstanceDto>(&to_json(&dto))
            .unwrap()
            .to_op()
            .unwrap();
        assert_eq!(again.fingerprint(), op.fingerprint());
    }

    #[test]
    fn complex_weights() {
        let text = r#"{"mass":[1,2],"atoms":[[0,1]],"u":{"re":[1,0],"im":[0,1]},"w":{"re":[1,1]}}"#;
        let op = parse_instance(text).unwrap();
        assert_eq!(op.u().values()[1], Complex64::new(0.0, 1.0));
        assert!(InstanceDto::from_op(&op).w.im.is_none());
    }

    fn err(text: &str) -> String {
        parse_instance(text).unwrap_err().to_string()
    }

    #[test]
    fn errors_name_the_field() {
        let e = err(r#"{"mass":[0,1],"atoms":[[0,1]],"u":{"re":[1,1]},"w":{"re":[1,1]}}"#);
        assert!(
            e.contains("`mass`") && e.contains("mass must be positive"),
            "{e}"
        );
        let e = err(r#"{"mass":[1,1],"atoms":[[0,1],[1]],"u":{"re":[1,1]},"w":{"re":[1,1]}}"#);
        assert!(e.contains("`atoms`"), "{e}");
        let e = err(r#"{"mass":[1,1],"atoms":[[0,1]],"u":{"re":[1,"x"]},"w":{"re":[1,1]}}"#);
        assert!(e.contains("u.re[1]"), "{e}");
        let e = err(r#"{"mass":[1,1],"atoms":[[0,1]],"u":{"re":[1]},"w":{"re":[1,1]}}"#);
        assert!(e.contains("`u`"), "{e}");
        let e = err(r#"{"mass":[1,1],"atoms":[[0,1]],"u":{"re":[1,1]},"w":{"re":[1,1],"im":[1]}}"#);
        assert!(e.contains("`w`"), "{e}");
        let e = err(r#"{"mass":[1,1],"atoms":[[0,1]],"u":{"re":[1,1]}}"#);
        assert!(e.contains("missing field `w`"), "{e}");
    }

    #[test]
    fn matrix_round_trip() {
        let op = parse_instance(W1).unwrap();
        let m = op.assemble_matrix();
        let dto = MatrixDto::from_matrix(&m);
        assert_eq!((dto.rows, dto.cols), (4, 4));
        let back = from_json::<MatrixDto>(&to_json(&dto))
            .unwrap()
            .to_matrix()
            .unwrap();
        assert_eq!(back, m);
    }
}
