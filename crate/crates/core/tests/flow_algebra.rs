use stconn::basis::{bperp_basis, circulation_basis, circulation_count, FlowTable};
use stconn::flow::{a_basis_for, b_space_definition, Layout};
use stconn::linalg::{max_normalized_overlap, rank};
use stconn::network::SwitchingNet;
use stconn::prep::{generate_basis, residual};
use stconn::span::BSpace;

const SIZES: [(usize, usize); 4] = [(2, 1), (2, 2), (4, 1), (4, 2)];

#[test]
fn space_dimensions() {
    for (n, ell) in SIZES {
        let net = SwitchingNet::build(n, ell, 0).unwrap();
        let (e, v) = (net.edge_count(), net.vertex_count());
        let layout = Layout::of(&net);
        assert_eq!(layout.dim(), 2 * e + 4);
        let space = BSpace::build(&net, n - 1).unwrap();
        assert_eq!(space.rank(), v + e, "n={n} l={ell}");
        assert_eq!(space.bperp_dim(), e + 4 - v);
        let on = vec![true; e];
        assert_eq!(a_basis_for(&on).len(), e + 2);
        assert_eq!(circulation_count(n, ell), e + 1 - v);
    }
}

#[test]
fn bperp_is_the_orthogonal_complement() {
    for (n, ell) in SIZES {
        let net = SwitchingNet::build(n, ell, 0).unwrap();
        let table = FlowTable::new(n, ell);
        for sink in [0, n - 1] {
            let bperp = bperp_basis(&net, &table, sink).normalized();
            let b = b_space_definition(&net, sink).normalized();
            let worst = bperp
                .vectors
                .iter()
                .flat_map(|p| b.vectors.iter().map(move |q| p.dot(q).abs()))
                .fold(0.0, f64::max);
            assert!(worst < 1e-9, "n={n} l={ell} sink={sink}: {worst}");
            let mut all = bperp.vectors.clone();
            all.extend(b.vectors.iter().cloned());
            assert_eq!(rank(&all), Layout::of(&net).dim());
        }
    }
}

#[test]
fn circulations_are_independent() {
    for (n, ell) in SIZES {
        let net = SwitchingNet::build(n, ell, 0).unwrap();
        let circ = circulation_basis(&net, &FlowTable::new(n, ell));
        assert_eq!(circ.len(), circulation_count(n, ell));
        assert!(max_normalized_overlap(&circ) < 1e-9);
    }
}

#[test]
fn inner_products_follow_the_symmetry_constants() {
    for (n, ell) in [(2, 2), (4, 2), (4, 3)] {
        let table = FlowTable::new(n, ell);
        for z in 1..n {
            for x in 0..n {
                let psi = table.psi(ell, z, x).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let got = table.p(ell, i, j).dot(&psi);
                        let want = table.predicted_p_psi(ell, i, j, z, x);
                        assert!((got - want).abs() < 1e-9, "n={n} l={ell} i={i} j={j} z={z} x={x}: {got} vs {want}");
                    }
                }
            }
        }
    }
}

#[test]
fn prepared_basis_is_orthogonal_and_complete() {
    for (n, ell) in [(2, 1), (2, 2), (4, 1)] {
        let net = SwitchingNet::build(n, ell, 0).unwrap();
        let table = FlowTable::new(n, ell);
        for sink in 0..n {
            let generated = generate_basis(n, ell, sink).unwrap();
            let reference = bperp_basis(&net, &table, sink);
            assert_eq!(generated.len(), reference.len());
            let vectors: Vec<_> = generated.iter().map(|(_, v, _)| v.clone()).collect();
            assert!(max_normalized_overlap(&vectors) < 1e-9);
            for (v, r) in vectors.iter().zip(&reference.vectors) {
                assert!(residual(v, r) < 1e-9);
            }
        }
    }
}
