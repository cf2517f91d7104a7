//! Mutual informations and entropy scans of a single tableau.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::geometry::{make_region, GeometryKind};
use crate::region::Region;
use crate::tableau::Tableau;

fn check_disjoint(regions: &[&Region], n: usize) -> Result<Region> {
    for r in regions {
        r.check_bounds(n)?;
    }
    Region::disjoint_union(regions)
}

/// `I(A;B) = S_A + S_B − S_{AB}` in bits.
pub fn mutual_information_bits(t: &Tableau, a: &Region, b: &Region) -> Result<usize> {
    let ab = check_disjoint(&[a, b], t.n_qubits())?;
    let sa = t.entropy_bits_of(a.indices());
    let sb = t.entropy_bits_of(b.indices());
    let sab = t.entropy_bits_of(ab.indices());
    Ok(sa + sb - sab)
}

/// `I(A;B)` in nats.
pub fn mutual_information(t: &Tableau, a: &Region, b: &Region) -> Result<f64> {
    Ok(mutual_information_bits(t, a, b)? as f64 * LN_2)
}

/// `I(A:B:C) = I(A;B) + I(A;C) − I(A;BC)` in bits.
pub fn tripartite_mutual_information_bits(
    t: &Tableau,
    a: &Region,
    b: &Region,
    c: &Region,
) -> Result<i64> {
    let abc = check_disjoint(&[a, b, c], t.n_qubits())?;
    let ab = Region::disjoint_union(&[a, b])?;
    let ac = Region::disjoint_union(&[a, c])?;
    let bc = Region::disjoint_union(&[b, c])?;
    let s = |r: &Region| t.entropy_bits_of(r.indices()) as i64;
    // Expanded form: S_A + S_B + S_C − S_AB − S_AC − S_BC + S_ABC.
    Ok(s(a) + s(b) + s(c) - s(&ab) - s(&ac) - s(&bc) + s(&abc))
}

/// `I(A:B:C)` in nats.
pub fn tripartite_mutual_information(t: &Tableau, a: &Region, b: &Region, c: &Region) -> Result<f64> {
    Ok(tripartite_mutual_information_bits(t, a, b, c)? as f64 * LN_2)
}

/// The first three of the four contiguous quarters `[0, N/4)`, `[N/4, N/2)`,
/// `[N/2, 3N/4)` in the ordering of `kind`.
pub fn quarter_regions(kind: GeometryKind, n: usize) -> Result<[Region; 3]> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::InvalidRegionSize { size: n / 4, n });
    }
    let q = n / 4;
    Ok([make_region(kind, 0, q, n)?, make_region(kind, q, q, n)?, make_region(kind, 2 * q, q, n)?])
}

/// `S_A` in bits for contiguous regions of every size `1..N` from `anchor`.
pub fn entropy_scan_bits(t: &Tableau, kind: GeometryKind, anchor: usize) -> Result<Vec<(usize, usize)>> {
    let n = t.n_qubits();
    (1..n)
        .map(|size| {
            let r = make_region(kind, anchor, size, n)?;
            Ok((size, t.entropy_bits_of(r.indices())))
        })
        .collect()
}

/// `(|A|, S_A)` in nats for contiguous regions of every size `1..N`.
pub fn entropy_scan(t: &Tableau, kind: GeometryKind, anchor: usize) -> Result<Vec<(usize, f64)>> {
    Ok(entropy_scan_bits(t, kind, anchor)?
        .into_iter()
        .map(|(size, s)| (size, s as f64 * LN_2))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(ix: &[usize]) -> Region {
        Region::arbitrary(ix.to_vec()).unwrap()
    }

    fn ghz(n: usize) -> Tableau {
        let mut t = Tableau::new_product_state(n).unwrap();
        t.apply_hadamard(0).unwrap();
        for q in 1..n {
            t.apply_cnot(0, q).unwrap();
        }
        t
    }

    #[test]
    fn product_state_has_no_information() {
        let t = Tableau::new_product_state(8).unwrap();
        assert_eq!(mutual_information(&t, &r(&[0, 1]), &r(&[5])).unwrap(), 0.0);
        let [a, b, c] = quarter_regions(GeometryKind::Linear, 8).unwrap();
        assert_eq!(tripartite_mutual_information(&t, &a, &b, &c).unwrap(), 0.0);
        assert!(entropy_scan(&t, GeometryKind::Treelike, 0).unwrap().iter().all(|&(_, s)| s == 0.0));
    }

    #[test]
    fn bell_pair_mutual_information() {
        let t = ghz(2);
        assert!((mutual_information(&t, &r(&[0]), &r(&[1])).unwrap() - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn ghz_tripartite_is_one_positive_bit() {
        let t = ghz(4);
        assert_eq!(tripartite_mutual_information_bits(&t, &r(&[0]), &r(&[1]), &r(&[2])).unwrap(), 1);
    }

    #[test]
    fn overlapping_regions_are_rejected() {
        let t = ghz(4);
        assert_eq!(mutual_information(&t, &r(&[0, 1]), &r(&[1])), Err(Error::OverlappingRegions(1)));
        assert!(tripartite_mutual_information(&t, &r(&[0]), &r(&[1]), &r(&[0])).is_err());
        assert!(mutual_information(&t, &r(&[0]), &r(&[4])).is_err());
    }

    #[test]
    fn scan_is_symmetric_for_ghz() {
        let t = ghz(8);
        let scan = entropy_scan_bits(&t, GeometryKind::Linear, 3).unwrap();
        assert_eq!(scan.len(), 7);
        assert!(scan.iter().all(|&(_, s)| s == 1));
    }

    #[test]
    fn quarters_are_disjoint_and_sized() {
        for kind in GeometryKind::ALL {
            let [a, b, c] = quarter_regions(kind, 16).unwrap();
            let u = Region::disjoint_union(&[&a, &b, &c]).unwrap();
            assert_eq!(u.len(), 12);
        }
        assert!(quarter_regions(GeometryKind::Linear, 2).is_err());
    }
}
