//! Synthetic inputs for the benchmarks.

use msr_core::EntityChange;

/// Changes by `devs` developers spread over `entities` entities of one window.
///
/// A small linear congruential sequence keeps the data reproducible without a
/// random number generator.
pub fn synthetic_changes(n: usize, devs: u32, entities: usize) -> Vec<EntityChange> {
    let mut state: u64 = 0x2545_f491_4f6c_dd1d;
    let mut next = move || {
        state = state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        state >> 33
    };
    (0..n)
        .map(|i| {
            let dev = (next() % devs as u64) as u32;
            let entity = next() as usize % entities;
            EntityChange {
                window_index: 0,
                file: format!("src/f{}.c", entity / 8),
                entity_name: format!("fn{entity}"),
                entity_kind: "function".into(),
                dev_name: format!("dev{dev}"),
                dev_email: format!("dev{dev}@example.org"),
                commit: format!("{i:040x}"),
                sloc: 1 + (next() % 40) as u32,
                ts: i as i64 * 60,
                dev_id: Some(dev),
            }
        })
        .collect()
}

/// A count series with a trend and some jitter.
pub fn synthetic_series(len: usize, seed: u64) -> Vec<u64> {
    (0..len as u64)
        .map(|i| 10 + i / 3 + (i.wrapping_mul(seed).wrapping_add(7) % 11))
        .collect()
}
