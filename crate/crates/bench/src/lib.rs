//! Fixtures shared by the benchmarks.

use prym_core::marking::parse_assignments;
use prym_core::{build_surface_group, level_marking, CoverData, FiniteGroupTable, QuotientMarking, SurfaceType};

pub fn q8_marking() -> QuotientMarking {
    let p = build_surface_group(SurfaceType::new(1, 0, 1)).unwrap();
    parse_assignments(&p, FiniteGroupTable::quaternion(), "a->i,b->j").unwrap()
}

pub fn level_cover(g: usize, n: usize, p: usize, level: usize) -> CoverData {
    let pres = build_surface_group(SurfaceType::new(g, n, p)).unwrap();
    CoverData::new(&level_marking(&pres, level).unwrap()).unwrap()
}
