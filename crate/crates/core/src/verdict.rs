//! Maps a domain to the status of the Nehari theorem on its Paley-Wiener space.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::classify::{classify, exposure_evidence, polyhedral_generators, Classification, ExposureEvidence};
use crate::domain::{ConvexBody, Shape};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Infinitely many exposed points observed; the bump construction applies.
    FailsByTheorem1 { evidence: ExposureEvidence },
    OpenPolytope,
    OpenPolyhedron,
    Unknown { reason: String, notes: Vec<String> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::FailsByTheorem1 { .. } => "FAILS_BY_THEOREM_1",
            Verdict::OpenPolytope => "OPEN_POLYTOPE",
            Verdict::OpenPolyhedron => "OPEN_POLYHEDRON",
            Verdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

fn cone_notes(body: &ConvexBody) -> Vec<String> {
    let mut notes = Vec::new();
    if let Shape::LorentzCone = body.shape() {
        notes.push(String::from("one extreme point (the apex at the origin)"));
        notes.push(String::from("every boundary ray from the apex is an extreme half-line, so there are infinitely many"));
        notes.push(String::from("stored as the solid cone |x'| <= x_n; the boundary surface alone is not convex"));
    }
    notes
}

pub fn nehari_verdict(omega: &ConvexBody) -> Result<Verdict> {
    match omega.dim() {
        1 => Ok(if omega.is_bounded() { Verdict::OpenPolytope } else { Verdict::OpenPolyhedron }),
        2 => Ok(match classify(omega)? {
            Classification::NonPolyhedral(evidence) => Verdict::FailsByTheorem1 { evidence },
            Classification::Polytope { .. } => Verdict::OpenPolytope,
            Classification::Polyhedron { .. } | Classification::LineStrip { .. } => Verdict::OpenPolyhedron,
            Classification::Inconclusive(e) => Verdict::Unknown {
                reason: String::from("exposed-point probe inconclusive"),
                notes: alloc::vec![e.transcript()],
            },
        }),
        n => {
            if let Some(g) = polyhedral_generators(omega) {
                return Ok(if g.rays.is_empty() { Verdict::OpenPolytope } else { Verdict::OpenPolyhedron });
            }
            let evidence = exposure_evidence(omega)?;
            if omega.is_bounded() && evidence.supports_infinitely_many() {
                return Ok(Verdict::FailsByTheorem1 { evidence });
            }
            let mut notes = cone_notes(omega);
            notes.push(evidence.transcript());
            let reason = if omega.is_bounded() {
                String::from("exposed-point probe inconclusive")
            } else {
                format!("unbounded non-polyhedral set in dimension {n}: not settled by the exposed-point construction")
            };
            Ok(Verdict::Unknown { reason, notes })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table() {
        let disc = ConvexBody::ball(alloc::vec![0.0, 0.0], 1.0).unwrap().with_open(true);
        assert_eq!(nehari_verdict(&disc).unwrap().name(), "FAILS_BY_THEOREM_1");
        let sq = ConvexBody::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(nehari_verdict(&sq).unwrap().name(), "OPEN_POLYTOPE");
        let quad = ConvexBody::hull_rays(alloc::vec![alloc::vec![0.0, 0.0]], alloc::vec![alloc::vec![1.0, 0.0], alloc::vec![0.0, 1.0]]).unwrap();
        assert_eq!(nehari_verdict(&quad).unwrap().name(), "OPEN_POLYHEDRON");
    }

    #[test]
    fn cone_is_unknown_with_annotations() {
        let cone = ConvexBody::lorentz_cone(3).unwrap();
        match nehari_verdict(&cone).unwrap() {
            Verdict::Unknown { notes, .. } => {
                assert!(notes.iter().any(|n| n.contains("one extreme point")));
                assert!(notes.iter().any(|n| n.contains("infinitely many")));
            }
            v => panic!("{v:?}"),
        }
        let ball = ConvexBody::ball(alloc::vec![0.0; 3], 1.0).unwrap();
        assert_eq!(nehari_verdict(&ball).unwrap().name(), "FAILS_BY_THEOREM_1");
    }
}
