use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rhdist::barlet::{i_ledger, windowed, MonomialMap, ProductTestForm};
use rhdist::mellin::mellin_ledger;
use rhdist::nilalg::monodromy_filtration;
use rhdist::sesqui::{psi_s, psi_s_via_malphap};
use rhdist::vfilt::v_orders;
use rhdist_bench::{germs, nilpotents, pairings};

fn germ_ops(c: &mut Criterion) {
    let gs = germs(64);
    c.bench_function("germ d_t d_tb", |b| b.iter(|| gs.iter().map(|g| g.d_t().d_tbar().n_terms()).sum::<usize>()));
    c.bench_function("germ v_orders", |b| b.iter(|| gs.iter().filter_map(|g| v_orders(black_box(g)).ok()).count()));
    c.bench_function("germ print and parse", |b| {
        b.iter(|| gs.iter().map(|g| rhdist::parse::parse_germ(&g.to_string()).unwrap().n_terms()).sum::<usize>())
    });
}

fn mellin(c: &mut Criterion) {
    let gs = germs(64);
    c.bench_function("mellin ledger", |b| b.iter(|| gs.iter().map(|g| mellin_ledger(black_box(g), 1, 0).max_order()).sum::<usize>()));
}

fn monodromy(c: &mut Criterion) {
    let ns = nilpotents(16, 6);
    c.bench_function("monodromy filtration dim 6", |b| b.iter(|| ns.iter().map(|n| monodromy_filtration(n).unwrap().n).sum::<usize>()));
}

fn two_route(c: &mut Criterion) {
    let ps = pairings(8);
    c.bench_function("psi_S direct", |b| {
        b.iter(|| ps.iter().flat_map(|p| p.alphas().into_iter().map(move |a| psi_s(p, &a).unwrap().rows())).sum::<usize>())
    });
    c.bench_function("psi_S via extensions", |b| {
        b.iter(|| {
            ps.iter()
                .flat_map(|p| {
                    p.alphas().into_iter().map(move |a| {
                        let k = p.left.psi_n(&a).nilpotency_index().unwrap();
                        psi_s_via_malphap(p, &a, k).unwrap().rows()
                    })
                })
                .sum::<usize>()
        })
    });
}

fn barlet(c: &mut Criterion) {
    let f = MonomialMap::parse("x^2*y").unwrap();
    let phi = ProductTestForm::radial(&f, &[1, 0], 5).unwrap();
    c.bench_function("barlet ledger x^2*y window 5", |b| b.iter(|| windowed(&i_ledger(&f, black_box(&phi)).unwrap(), 5).max_order()));
}

criterion_group!(benches, germ_ops, mellin, monodromy, two_route, barlet);
criterion_main!(benches);
