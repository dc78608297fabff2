use prym_core::analysis::fixed_subspace;
use prym_core::linalg::{nullspace, QuotientLattice};
use prym_core::marking::{level_marking, parse_assignments};
use prym_core::prym::{preserves_lattice, GeneratorMatrices};
use prym_core::{
    build_surface_group, compose, is_symplectic, standard_generators, CoverData, FiniteGroupTable, GeneratorLibrary,
    McgWord, PrymRepresentation, SurfaceType,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q8() -> (CoverData, GeneratorLibrary) {
    let s = SurfaceType::new(1, 0, 1);
    let p = build_surface_group(s).unwrap();
    let m = parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j").unwrap();
    (CoverData::new(&m).unwrap(), standard_generators(s).unwrap())
}

fn level2_genus2() -> (CoverData, GeneratorLibrary) {
    let s = SurfaceType::new(2, 1, 0);
    let p = build_surface_group(s).unwrap();
    (CoverData::new(&level_marking(&p, 2).unwrap()).unwrap(), standard_generators(s).unwrap())
}

fn structural(c: &CoverData, lib: &GeneratorLibrary, dim_v: usize) {
    let rep = PrymRepresentation::for_library(c, lib).unwrap();
    assert_eq!(rep.boundary.dim_v(), dim_v);
    let j = &rep.form.v;
    assert!(j.is_antisymmetric());
    assert_ne!(j.determinant().unwrap(), 0.into());
    // radical of the raw form is exactly the saturated boundary span
    let radical = nullspace(&rep.form.raw).unwrap();
    let from_radical = QuotientLattice::new(c.h1_rank(), &radical).unwrap();
    assert_eq!(from_radical.sub_rank(), rep.boundary.d_b());
    for v in &rep.boundary.vectors {
        assert!(from_radical.in_span(v).unwrap());
    }
    for r in &radical {
        assert!(rep.boundary.lattice.in_span(r).unwrap());
    }
    for m in &rep.matrices {
        assert!(m.matrix.is_unimodular(), "{}", m.name);
        assert!(preserves_lattice(&m.raw, &rep.boundary.lattice.sub_basis).unwrap(), "{}", m.name);
        assert!(is_symplectic(&m.matrix, j).unwrap(), "{}", m.name);
    }
}

#[test]
fn q8_structure() {
    let (c, lib) = q8();
    structural(&c, &lib, 6);
}

#[test]
fn level2_genus2_structure() {
    let (c, lib) = level2_genus2();
    structural(&c, &lib, 34);
}

#[test]
fn level2_genus2_has_no_fixed_vectors() {
    let (c, lib) = level2_genus2();
    let rep = PrymRepresentation::for_library(&c, &lib).unwrap();
    assert!(fixed_subspace(34, &rep.v_matrices()).unwrap().is_empty());
}

#[test]
fn composition_is_multiplicative() {
    let (c, lib) = q8();
    let gens = GeneratorMatrices::new(&c, &lib).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = lib.generators.len();
    for _ in 0..20 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let e1 = &lib.generators[i].table;
        let e2 = &lib.generators[j].table;
        let composite = prym_core::prym::raw_matrix(&c, &compose(e1, e2).unwrap()).unwrap();
        let product = gens.word(&McgWord::gen(i), c.h1_rank()).unwrap().unwrap().mul(
            &gens.word(&McgWord::gen(j), c.h1_rank()).unwrap().unwrap(),
        );
        assert_eq!(composite, product.unwrap());
    }
}

#[test]
fn transfer_intertwines_base_action() {
    for (c, lib) in [q8(), level2_genus2()] {
        let t = c.transfer_matrix().unwrap();
        for g in &lib.generators {
            let raw = prym_core::prym::raw_matrix(&c, &g.table).unwrap();
            let lhs = raw.mul(&t).unwrap();
            let rhs = t.mul(&g.table.abelianized_matrix()).unwrap();
            assert_eq!(lhs, rhs, "{}", g.name);
        }
    }
}

#[test]
fn closed_level2_is_symplectic_and_unimodular() {
    let s = SurfaceType::new(2, 0, 0);
    let p = build_surface_group(s).unwrap();
    let c = CoverData::new(&level_marking(&p, 2).unwrap()).unwrap();
    let rep = prym_core::prym::boundary_subspace(&c).unwrap();
    let f = prym_core::prym::intersection_form(&c, &rep).unwrap();
    assert_eq!(f.v.determinant().unwrap(), 1.into());
}
