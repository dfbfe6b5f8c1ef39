//! Input specifications such as `fock:2` or `cat:1.5,-1`.

use noclone::states::{make_superposition, sample_haar_pure, StateData, C64};
use noclone::InputState;

pub fn parse_input(spec: &str) -> Result<InputState, String> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| format!("input spec {spec:?} lacks a ':'"))?;
    let nums = || -> Result<Vec<f64>, String> {
        args.split(',').map(|a| a.trim().parse::<f64>().map_err(|_| format!("bad number {a:?} in {spec:?}"))).collect()
    };
    match kind {
        "fock" => args.trim().parse::<usize>().map(InputState::Fock).map_err(|_| format!("fock needs a photon number, got {args:?}")),
        "superposition" => {
            let c = nums()?;
            if c.len() != 3 {
                return Err(format!("superposition needs three coefficients, got {}", c.len()));
            }
            let psi = make_superposition(C64::new(c[0], 0.0), C64::new(c[1], 0.0), C64::new(c[2], 0.0)).map_err(|e| e.to_string())?;
            Ok(InputState::pure(psi))
        }
        "cat" => {
            let c = nums()?;
            if c.len() != 2 {
                return Err("cat needs alpha,gamma".into());
            }
            let gamma = match c[1] {
                g if g == 1.0 => 1,
                g if g == -1.0 => -1,
                g if g == 0.0 => 0,
                g => return Err(format!("cat gamma must be 1, -1 or 0, not {g}")),
            };
            if !(c[0] >= 0.0 && c[0].is_finite()) {
                return Err(format!("cat alpha must be a finite non-negative number, not {}", c[0]));
            }
            Ok(InputState::Cat { alpha: c[0], gamma })
        }
        "random" => {
            let seed = args.trim().parse::<u64>().map_err(|_| format!("random needs an integer seed, got {args:?}"))?;
            Ok(InputState::pure(sample_haar_pure(3, seed)))
        }
        "file" => {
            let text = std::fs::read_to_string(args).map_err(|e| format!("cannot read {args}: {e}"))?;
            match StateData::from_json_str(&text).map_err(|e| format!("{args}: {e}"))? {
                StateData::Pure(v) => Ok(InputState::pure(v)),
                StateData::Density(d) => Ok(InputState::Mixed(d)),
            }
        }
        _ => Err(format!("unknown input kind {kind:?} (expected fock, superposition, cat, random or file)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(parse_input("fock:3").unwrap(), InputState::Fock(3));
        assert_eq!(parse_input("cat:0.5,-1").unwrap(), InputState::Cat { alpha: 0.5, gamma: -1 });
        assert!(parse_input("superposition:1,0,1").is_ok());
        assert_eq!(parse_input("random:4").unwrap(), parse_input("random:4").unwrap());
        for bad in ["fock", "fock:-1", "cat:1,2", "superposition:1,2", "squeezed:1", "cat:nan,1"] {
            assert!(parse_input(bad).is_err(), "{bad}");
        }
    }
}
