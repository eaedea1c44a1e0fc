//! Lives in its own test binary because it installs the counting allocator.

use rcslab_bench::config::{RcsSpec, RunSpec, Source};
use rcslab_bench::harness::bench_sweep;
use rcslab_bench::mem::{CountingAlloc, MemorySource};

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

#[test]
fn peak_memory_grows_with_qubits() {
    let specs: Vec<RunSpec> = [(3, 4), (2, 7), (4, 4)]
        .into_iter()
        .map(|(r, c)| RunSpec::new(Source::Rcs(RcsSpec::grid(r, c, "EFGH", 14, 0)), 1_000, 1))
        .collect();
    let mut csv = Vec::new();
    let records: Vec<_> = bench_sweep(&specs, &mut csv).unwrap().into_iter().map(Result::unwrap).collect();
    assert_eq!(records.iter().map(|r| r.n).collect::<Vec<_>>(), [12, 14, 16]);
    for r in &records {
        assert_eq!(r.peak_memory_source, MemorySource::Allocator);
        assert!(r.peak_memory_bytes >= 16 << r.n, "n={} peak={}", r.n, r.peak_memory_bytes);
    }
    assert!(records.windows(2).all(|w| w[0].peak_memory_bytes < w[1].peak_memory_bytes));
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
}
