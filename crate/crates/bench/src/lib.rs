//! Parameter sets shared by the benchmarks.

use qbcharge_core::{Complex64, SystemParams};

/// Coherent coupling at the conventional optimum.
pub fn conventional() -> SystemParams {
    SystemParams::default().with_drive(0.1, 0.1991858428704209).with_coupling(0.2, 0.0).with_local(0.05, 0.01)
}

/// Coherent coupling plus an in-phase shared bath.
pub fn shared_added() -> SystemParams {
    let one = Complex64::new(1.0, 0.0);
    conventional().with_shared(0.4, one, one)
}

/// Small-amplitude set for the density-matrix oracle.
pub fn oracle() -> SystemParams {
    qbcharge_core::scenario::oracle_params()
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_validate() {
        for p in [super::conventional(), super::shared_added(), super::oracle()] {
            p.validate().unwrap();
        }
    }
}
