use criterion::{criterion_group, criterion_main, Criterion};
use prym_bench::{level_cover, q8_marking};
use prym_core::analysis::{coinvariants_both, random_matrix_group};
use prym_core::{orbit_search, standard_generators, CoverData, PrymRepresentation, SurfaceType};

fn covers(c: &mut Criterion) {
    let m = q8_marking();
    c.bench_function("cover q8", |b| b.iter(|| CoverData::new(&m).unwrap()));
    c.bench_function("cover level 2 on 2,1,0", |b| b.iter(|| level_cover(2, 1, 0, 2)));
}

fn representations(c: &mut Criterion) {
    let cover = level_cover(2, 1, 0, 2);
    let lib = standard_generators(SurfaceType::new(2, 1, 0)).unwrap();
    c.bench_function("prym level 2 on 2,1,0", |b| {
        b.iter(|| PrymRepresentation::for_library(&cover, &lib).unwrap())
    });
}

fn orbits(c: &mut Criterion) {
    let cover = CoverData::new(&q8_marking()).unwrap();
    let lib = standard_generators(SurfaceType::new(1, 0, 1)).unwrap();
    let ms = PrymRepresentation::for_library(&cover, &lib).unwrap().v_matrices();
    c.bench_function("orbit cap 10000", |b| {
        b.iter(|| orbit_search(&ms, &[1, 0, 0, 0, 0, 0], 10_000).unwrap())
    });
}

fn coinvariants(c: &mut Criterion) {
    let groups: Vec<_> = (0..20).map(|k| random_matrix_group(k, 8, 3)).collect();
    c.bench_function("coinvariants dim 8", |b| {
        b.iter(|| groups.iter().map(|ms| coinvariants_both(8, ms).unwrap().by_duality).sum::<usize>())
    });
}

criterion_group!(benches, covers, representations, orbits, coinvariants);
criterion_main!(benches);
