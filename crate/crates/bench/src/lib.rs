//! Shared fixtures for the criterion benches.

use rootshell::geometry::ShellSpec;
use rootshell::semidense::levi_of_nodes;
use rootshell::{CartanType, Result, RootSystem, SubsystemMask};

/// A root system with the Levi of its first node, as the exponent benches use it.
pub fn system_with_levi(t: CartanType, rank: usize) -> Result<(RootSystem, SubsystemMask)> {
    let rs = RootSystem::split(t, rank)?;
    let m = levi_of_nodes(&rs, &[0]);
    Ok((rs, m))
}

pub fn sl2_shell(t: f64) -> Result<ShellSpec> {
    ShellSpec::extremal(2, 0, rootshell::geometry::DEFAULT_EPS0, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let (rs, m) = system_with_levi(CartanType::B, 3).unwrap();
        assert_eq!(rs.num_roots(), 18);
        assert_eq!(m.len(), 8);
        assert_eq!(sl2_shell(6.0).unwrap().n, 2);
    }
}
