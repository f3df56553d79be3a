//! Compares the parallel and sequential execution of the verification
//! fan-out on the canonical rank-2 system, and times the braid-relation
//! sweep of the representation layer.

use criterion::{criterion_group, criterion_main, Criterion};
use factoperad::cat::BraidedObject;
use factoperad::factsys::FactorizedSystem;
use factoperad::par::ExecMode;
use factoperad::scalar::FieldTag;
use factoperad::verify::{verify_factorization, VerifyOptions};

fn bench_verify(c: &mut Criterion) {
    let obj = BraidedObject::flip(2, FieldTag::Q, true);
    let sys = FactorizedSystem::from_object(obj, 3).unwrap();
    let mut group = c.benchmark_group("verify_factorization_depth3");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        let opts = VerifyOptions::new(3).with_mode(ExecMode::Parallel);
        b.iter(|| {
            let report = verify_factorization(&sys, &opts);
            assert!(report.ok);
        })
    });
    group.bench_function("sequential", |b| {
        let opts = VerifyOptions::new(3).with_mode(ExecMode::Sequential);
        b.iter(|| {
            let report = verify_factorization(&sys, &opts);
            assert!(report.ok);
        })
    });
    group.finish();
}

fn bench_braid_relations(c: &mut Criterion) {
    let obj = BraidedObject::flip(3, FieldTag::Q, true);
    c.bench_function("braid_relations_rank3_n4", |b| {
        b.iter(|| {
            let rep = obj.rep(4);
            for l in 1..3i32 {
                assert_eq!(
                    rep.eval_word(&[l, l + 1, l]),
                    rep.eval_word(&[l + 1, l, l + 1])
                );
            }
        })
    });
}

criterion_group!(benches, bench_verify, bench_braid_relations);
criterion_main!(benches);
