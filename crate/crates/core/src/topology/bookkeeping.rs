use super::{DegreeMethod, DegreeReport};
use crate::error::{Error, Result};
use crate::maps::MapDescriptor;

/// Degree (equal dimensions) or Hopf invariant (S³ → S²) with dimensions.
struct Audit {
    value: i64,
    domain: usize,
    codomain: usize,
}

fn audit(d: &MapDescriptor) -> Result<Audit> {
    use MapDescriptor as D;
    let leaf = |value, domain, codomain| Ok(Audit { value, domain, codomain });
    match d {
        D::Identity { dim } => leaf(1, *dim, *dim),
        D::Constant { domain_dim, value } => leaf(0, *domain_dim, value.dim()),
        D::Hopf | D::HopfBump { .. } => leaf(1, 3, 2),
        D::EquatorCollapse { dim } => leaf(1 + (-1i64).pow(*dim as u32 + 1), *dim, *dim),
        D::Rotation { rotation } => leaf(1, rotation.dim(), rotation.dim()),
        D::BumpDeg1 { center, .. } => leaf(1, center.dim(), center.dim()),
        D::MultiBubble { k, .. } => leaf(*k as i64, 2, 2),
        D::Compose { outer, inner } => {
            let (o, i) = (audit(outer)?, audit(inner)?);
            if o.domain != i.codomain {
                return Err(Error::Descriptor(format!(
                    "composition of S^{} → S^{} after S^{} → S^{}",
                    o.domain, o.codomain, i.domain, i.codomain
                )));
            }
            let value = match (o.domain == o.codomain, i.domain == i.codomain) {
                (true, true) => o.value * i.value,
                // deg_H(v∘g) = (deg v)²·deg_H(g)
                (true, false) => o.value * o.value * i.value,
                // precomposing with a self-map of S³ multiplies by its degree
                (false, true) => o.value * i.value,
                (false, false) => {
                    return Err(Error::Descriptor("composition of two maps that change dimension".into()))
                }
            };
            leaf(value, i.domain, o.codomain)
        }
        D::Patch { basepoint, base, pieces } => {
            let mut value = 0;
            let mut domain = None;
            if let Some(base) = base {
                let a = audit(base)?;
                value += a.value;
                domain = Some(a.domain);
            }
            for piece in pieces {
                let a = audit(&piece.map)?;
                if *domain.get_or_insert(a.domain) != a.domain || a.codomain != basepoint.dim() {
                    return Err(Error::Descriptor("patch pieces of mixed dimensions".into()));
                }
                value += a.value;
            }
            leaf(value, domain.unwrap_or(3), basepoint.dim())
        }
        D::OrientationFlip { inner } => {
            let a = audit(inner)?;
            leaf(-a.value, a.domain, a.codomain)
        }
        D::PrescribedHopf { degree, body, .. } => {
            let a = audit(body)?;
            if a.value != *degree {
                return Err(Error::Descriptor(format!(
                    "construction carries invariant {} but was built for {degree}",
                    a.value
                )));
            }
            Ok(a)
        }
    }
}

/// Exact degree or Hopf invariant read off the construction record.
pub fn bookkept_degree(descriptor: &MapDescriptor) -> Result<DegreeReport> {
    let a = audit(descriptor)?;
    let same = a.domain == a.codomain;
    if !same && (a.domain, a.codomain) != (3, 2) {
        return Err(Error::Descriptor(format!("no integer invariant for S^{} → S^{}", a.domain, a.codomain)));
    }
    Ok(DegreeReport::exact(a.value, DegreeMethod::Bookkeeping))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpherePoint;
    use crate::maps::{
        composed_with_hopf, equator_collapse, hopf_map, identity, multi_bubble, orientation_flip, prescribed_hopf_map,
    };

    fn b() -> SpherePoint {
        SpherePoint::new(&[1.0, 0.0, 0.0]).unwrap()
    }

    fn deg(d: &MapDescriptor) -> i64 {
        bookkept_degree(d).unwrap().value
    }

    #[test]
    fn leaves() {
        assert_eq!(deg(hopf_map().descriptor()), 1);
        assert_eq!(deg(identity(3).unwrap().descriptor()), 1);
        assert_eq!(deg(equator_collapse(2).unwrap().descriptor()), 0);
        assert_eq!(deg(equator_collapse(3).unwrap().descriptor()), 2);
        assert_eq!(deg(multi_bubble(4, &b()).unwrap().descriptor()), 4);
    }

    #[test]
    fn composition_squares_the_base_degree() {
        let u = composed_with_hopf(&multi_bubble(3, &b()).unwrap()).unwrap();
        assert_eq!(deg(u.descriptor()), 9);
    }

    #[test]
    fn prescribed_family() {
        for d in [-3, 0, 1, 2, 5, 7, 9] {
            assert_eq!(deg(prescribed_hopf_map(d).unwrap().descriptor()), d, "d = {d}");
        }
        assert_eq!(deg(orientation_flip(&prescribed_hopf_map(5).unwrap()).descriptor()), -5);
    }

    #[test]
    fn mismatched_records_are_rejected() {
        let bad = MapDescriptor::PrescribedHopf { degree: 3, k: 1, body: Box::new(MapDescriptor::Hopf) };
        assert!(bookkept_degree(&bad).is_err());
        let skew = MapDescriptor::Compose { outer: Box::new(MapDescriptor::Hopf), inner: Box::new(MapDescriptor::Hopf) };
        assert!(bookkept_degree(&skew).is_err());
    }
}
