//! Fixed benchmark inputs shared by the criterion benches.

use disprop_core::instances::random_instance;
use disprop_core::Instance;

/// `count` seeded instances with `n` agents and up to six segments each.
pub fn corpus(n: usize, count: u64) -> Vec<Instance> {
    (0..count)
        .map(|s| random_instance(n, 6, 0xbe7c_0000 + s).expect("valid generator arguments"))
        .collect()
}
