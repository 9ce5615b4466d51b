//! Persisted evidence and its re-validation by recomputation.
//!
//! Each variant carries its inputs and claimed outputs. [`verify`] recomputes
//! the claims from the inputs alone and reports one named check per claim.

use serde::{Deserialize, Serialize};

use crate::census::{self, CountReport, InclusionReport, Prop, SBallCertificate};
use crate::convexity::{cut, CutResult};
use crate::deamplify::{deamplify, remeasure, DeamplifyResult, Guarantee};
use crate::error::{Error, Result};
use crate::expansion::{revalidate, ExpansionCertificate};
use crate::limits::Limits;
use crate::perm::{GenTuple, Perm, Subset};
use crate::rational::{self, Rational};
use crate::strange::{verify_family, verify_strange, FarExpanderFamily, StrangeCandidate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    Expander {
        tuple: GenTuple,
        certificate: ExpansionCertificate,
    },
    SBall(SBallCertificate),
    Census {
        report: CountReport,
        /// The fixed permutation of the count, for props that have one.
        center: Option<Perm>,
    },
    Deamplify {
        x: GenTuple,
        y: GenTuple,
        u: Perm,
        #[serde(with = "rational::as_str")]
        lambda: Rational,
        y_cert: Option<ExpansionCertificate>,
        result: DeamplifyResult,
    },
    Strange(StrangeCandidate),
    Family(FarExpanderFamily),
    Inclusion(InclusionReport),
    Cut {
        tuple: GenTuple,
        subset: Subset,
        result: CutResult,
    },
}

impl Evidence {
    pub fn kind(&self) -> &'static str {
        match self {
            Evidence::Expander { .. } => "expander",
            Evidence::SBall(_) => "s-ball",
            Evidence::Census { .. } => "census",
            Evidence::Deamplify { .. } => "deamplify",
            Evidence::Strange(_) => "strange",
            Evidence::Family(_) => "family",
            Evidence::Inclusion(_) => "inclusion",
            Evidence::Cut { .. } => "cut",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub kind: String,
    pub ok: bool,
    pub checks: Vec<Check>,
}

fn checks(list: Vec<(&str, bool)>) -> Vec<Check> {
    list.into_iter().map(|(name, ok)| Check { name: name.to_string(), ok }).collect()
}

fn same_report(a: &CountReport, b: &CountReport) -> bool {
    a.prop == b.prop
        && a.n == b.n
        && a.parameter == b.parameter
        && a.count == b.count
        && a.bound == b.bound
        && a.satisfied == b.satisfied
        && a.comparison == b.comparison
        && a.hypothesis == b.hypothesis
}

fn recount(report: &CountReport, center: Option<&Perm>, limits: &Limits) -> Result<CountReport> {
    let need_center = || center.ok_or_else(|| Error::InvalidParameter(format!("{} evidence needs a center", report.prop)));
    let (n, param) = (report.n, &report.parameter);
    match report.prop {
        Prop::HammingBall => census::count_hamming_ball(need_center()?, param, limits),
        Prop::CycleCommuting => census::count_cycle_commuting(n, param, limits),
        Prop::NearCommuting => census::count_near_commuting(need_center()?, param, limits),
        Prop::SBall => Ok(census::count_s_ball(need_center()?, param, limits)?.report),
        Prop::LSet => census::count_l_set(n, param, limits),
        Prop::KSet => census::count_k_set(n, param, limits),
        Prop::TSet => census::count_t_set(n, param, limits),
    }
}

/// Recomputes every claim in `evidence`. Degree ceilings in `limits` apply,
/// so evidence produced under larger limits needs the same limits here.
pub fn verify(evidence: &Evidence, limits: &Limits) -> Result<Verification> {
    let list: Vec<Check> = match evidence {
        Evidence::Expander { tuple, certificate } => checks(vec![("certificate", revalidate(tuple, certificate, limits)?)]),
        Evidence::SBall(cert) => checks(vec![
            ("members", census::verify_s_ball(cert)?),
            ("report", same_report(&recount(&cert.report, Some(&cert.center), limits)?, &cert.report)),
        ]),
        Evidence::Census { report, center } => {
            let again = recount(report, center.as_ref(), limits)?;
            checks(vec![
                ("count", again.count == report.count),
                ("bound", again.bound == report.bound),
                ("verdict", again.satisfied == report.satisfied && again.comparison == report.comparison),
                ("report", same_report(&again, report)),
            ])
        }
        Evidence::Deamplify { x, y, u, lambda, y_cert, result } => {
            let again = deamplify(x, y, u, lambda, y_cert.as_ref(), result.block_matrix.is_some())?;
            let mut list = vec![
                ("remeasure", remeasure(x, y, u, result)?),
                ("rerun", again == *result),
            ];
            if let (Some(cert), Guarantee::Certified) = (y_cert, result.guarantee) {
                list.push(("y-expander", revalidate(y, cert, limits)?));
            }
            checks(list)
        }
        Evidence::Strange(c) => checks(verify_strange(c, limits)?),
        Evidence::Family(f) => checks(verify_family(f, limits)?),
        Evidence::Inclusion(report) => {
            let again = census::check_k_inclusion(report.n, &report.delta, limits)?;
            checks(vec![("report", again == *report), ("holds", report.holds())])
        }
        Evidence::Cut { tuple, subset, result } => checks(vec![("cut", cut(tuple, subset)? == *result)]),
    };
    Ok(Verification { kind: evidence.kind().to_string(), ok: list.iter().all(|c| c.ok), checks: list })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::check_expander;
    use crate::perm::cycle;

    fn roundtrip(e: &Evidence) -> Evidence {
        serde_json::from_str(&serde_json::to_string(e).unwrap()).unwrap()
    }

    #[test]
    fn expander_evidence_roundtrips_and_detects_tampering() {
        let limits = Limits::default();
        let t = GenTuple::new(vec![cycle(8).unwrap(), Perm::reversal(8)]).unwrap();
        let certificate = check_expander(&t, &Rational::new(1, 10), 0, &limits).unwrap();
        let e = Evidence::Expander { tuple: t, certificate };
        let back = roundtrip(&e);
        assert_eq!(back, e);
        assert!(verify(&back, &limits).unwrap().ok);
        if let Evidence::Expander { certificate, .. } = &mut { back.clone() } {
            certificate.min_ratio = Some(Rational::new(9, 10));
            let bad = Evidence::Expander { tuple: GenTuple::single(cycle(8).unwrap()), certificate: certificate.clone() };
            assert!(!verify(&bad, &limits).unwrap().ok);
        }
    }

    #[test]
    fn census_evidence() {
        let limits = Limits::default();
        let report = census::count_cycle_commuting(5, &Rational::new(1, 5), &limits).unwrap();
        let e = roundtrip(&Evidence::Census { report: report.clone(), center: None });
        assert!(verify(&e, &limits).unwrap().ok);
        let mut forged = report;
        forged.count += 1;
        assert!(!verify(&Evidence::Census { report: forged, center: None }, &limits).unwrap().ok);

        let report = census::count_hamming_ball(&Perm::identity(5), &Rational::new(1, 2), &limits).unwrap();
        assert!(verify(&Evidence::Census { report: report.clone(), center: Some(Perm::identity(5)) }, &limits).unwrap().ok);
        assert!(verify(&Evidence::Census { report, center: None }, &limits).is_err());
    }

    #[test]
    fn cut_and_inclusion_evidence() {
        let limits = Limits::default();
        let t = GenTuple::single(Perm::from_images(vec![1, 0, 3, 2]).unwrap());
        let subset = Subset::from_members(4, [0, 1]).unwrap();
        let result = cut(&t, &subset).unwrap();
        let e = roundtrip(&Evidence::Cut { tuple: t, subset, result });
        assert!(verify(&e, &limits).unwrap().ok);

        let report = census::check_k_inclusion(5, &Rational::new(1, 4), &limits).unwrap();
        let e = roundtrip(&Evidence::Inclusion(report));
        let v = verify(&e, &limits).unwrap();
        assert!(v.ok, "{v:?}");
        assert_eq!(v.kind, "inclusion");
    }
}
