//! Input-state tokens.
//!
//! Spinful: `<particle>.<antiparticle>` with each half one of `0`, `up`,
//! `down`, `updown`, e.g. `up.up` or `updown.0`. Spinless: `<a>.<b>` with
//! `0` or `1`, e.g. `1.1`. `vac` is the vacuum in either case and `full`
//! the fully occupied state.

use pairent_core::bogolyubov::Scenario;
use pairent_core::fock::Occupation;

use crate::CliError;

const SPIN_HALVES: [&str; 4] = ["0", "up", "down", "updown"];

pub fn parse_state(token: &str, scenario: Scenario) -> Result<Occupation, CliError> {
    let token = token.trim();
    let n = scenario.n_modes();
    match token {
        "vac" => return Ok(Occupation::VACUUM),
        "full" => return Ok(Occupation((1u32 << n) - 1)),
        _ => {}
    }
    let bad = || CliError::Usage(format!("state {token:?} is not valid for scenario {scenario}"));
    let (p, a) = token.split_once('.').ok_or_else(bad)?;
    let half = |s: &str| -> Result<u32, CliError> {
        if scenario.is_spinful() {
            SPIN_HALVES.iter().position(|h| *h == s).map(|i| i as u32).ok_or_else(bad)
        } else {
            match s {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(bad()),
            }
        }
    };
    let shift = n as u32 / 2;
    Ok(Occupation(half(p)? | half(a)? << shift))
}

pub fn state_token(occ: Occupation, scenario: Scenario) -> String {
    let shift = scenario.n_modes() / 2;
    let mask = (1u32 << shift) - 1;
    let (p, a) = (occ.bits() & mask, occ.bits() >> shift & mask);
    if scenario.is_spinful() {
        format!("{}.{}", SPIN_HALVES[p as usize], SPIN_HALVES[a as usize])
    } else {
        format!("{p}.{a}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spinful_tokens() {
        let sc = Scenario::ChargeOnly;
        assert_eq!(parse_state("vac", sc).unwrap(), Occupation(0));
        assert_eq!(parse_state("up.up", sc).unwrap(), Occupation(0b0101));
        assert_eq!(parse_state("down.up", sc).unwrap(), Occupation(0b0110));
        assert_eq!(parse_state("updown.0", sc).unwrap(), Occupation(0b0011));
        assert_eq!(parse_state("full", sc).unwrap(), Occupation(15));
        for x in 0..16 {
            assert_eq!(parse_state(&state_token(Occupation(x), sc), sc).unwrap(), Occupation(x));
        }
    }

    #[test]
    fn spinless_tokens() {
        let sc = Scenario::Spinless;
        assert_eq!(parse_state("1.1", sc).unwrap(), Occupation(3));
        assert_eq!(parse_state("0.1", sc).unwrap(), Occupation(2));
        assert_eq!(state_token(Occupation(1), sc), "1.0");
        assert!(parse_state("up.up", sc).is_err());
        assert!(parse_state("1.1", Scenario::ChargeOnly).is_err());
        assert!(parse_state("up", Scenario::ChargeOnly).is_err());
    }
}
