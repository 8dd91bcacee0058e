//! Built-in substitutions.

use super::one_d::Substitution1D;
use super::two_d::{GeometricSubstitution2D, LatticeCell, LatticeKind, PlacedTile, Prototile};
use super::SubstitutionError;

#[derive(Clone, Debug)]
pub enum Builtin {
    OneD(Substitution1D),
    TwoD(GeometricSubstitution2D),
}

impl Builtin {
    pub fn dim(&self) -> usize {
        match self {
            Builtin::OneD(_) => 1,
            Builtin::TwoD(_) => 2,
        }
    }

    pub fn into_1d(self) -> Result<Substitution1D, SubstitutionError> {
        match self {
            Builtin::OneD(s) => Ok(s),
            Builtin::TwoD(s) => Err(SubstitutionError::WrongDimension(s.name, 1)),
        }
    }

    pub fn into_2d(self) -> Result<GeometricSubstitution2D, SubstitutionError> {
        match self {
            Builtin::TwoD(s) => Ok(s),
            Builtin::OneD(_) => Err(SubstitutionError::WrongDimension("1d".into(), 2)),
        }
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    vec!["fibonacci", "thue_morse", "period_doubling", "chair", "half_hex"]
}

pub fn builtin(name: &str) -> Result<Builtin, SubstitutionError> {
    let one = |alphabet: &[&str], rules: &[&[u8]]| -> Result<Builtin, SubstitutionError> {
        Ok(Builtin::OneD(Substitution1D::new(
            alphabet.iter().map(|s| s.to_string()).collect(),
            rules.iter().map(|r| r.to_vec()).collect(),
        )?))
    };
    match name {
        "fibonacci" => one(&["a", "b"], &[&[0, 1], &[0]]),
        "thue_morse" => one(&["a", "b"], &[&[0, 1], &[1, 0]]),
        "period_doubling" => one(&["a", "b"], &[&[0, 1], &[0, 0]]),
        "chair" => Ok(Builtin::TwoD(chair()?)),
        "half_hex" => Ok(Builtin::TwoD(half_hex()?)),
        other => Err(SubstitutionError::UnknownBuiltin(other.to_string())),
    }
}

/// L-tromino rep-tile: inflation by 2 splits a chair into four chairs.
fn chair() -> Result<GeometricSubstitution2D, SubstitutionError> {
    let proto = Prototile {
        label: "chair".to_string(),
        cells: vec![
            LatticeCell::Square(0, 0),
            LatticeCell::Square(1, 0),
            LatticeCell::Square(0, 1),
        ],
    };
    let rule = vec![
        PlacedTile { proto: 0, rot: 0, pos: (0, 0) },
        PlacedTile { proto: 0, rot: 0, pos: (1, 1) },
        PlacedTile { proto: 0, rot: 1, pos: (4, 0) },
        PlacedTile { proto: 0, rot: 3, pos: (0, 4) },
    ];
    GeometricSubstitution2D::new(
        "chair".to_string(),
        LatticeKind::Square,
        vec![proto],
        vec![rule],
    )
}

/// Half-hexagon rep-tile on the triangular lattice: inflation by 2 splits
/// a half-hex into four half-hexes.
fn half_hex() -> Result<GeometricSubstitution2D, SubstitutionError> {
    let proto = Prototile {
        label: "half_hex".to_string(),
        cells: vec![
            LatticeCell::Up(0, 0),
            LatticeCell::Down(0, 0),
            LatticeCell::Up(1, 0),
        ],
    };
    let rule = vec![
        PlacedTile { proto: 0, rot: 4, pos: (0, 2) },
        PlacedTile { proto: 0, rot: 3, pos: (2, 2) },
        PlacedTile { proto: 0, rot: 0, pos: (1, 0) },
        PlacedTile { proto: 0, rot: 2, pos: (4, 0) },
    ];
    GeometricSubstitution2D::new(
        "half_hex".to_string(),
        LatticeKind::Triangular,
        vec![proto],
        vec![rule],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for name in builtin_names() {
            assert!(builtin(name).is_ok(), "{name}");
        }
        assert!(matches!(
            builtin("penrose"),
            Err(SubstitutionError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn dimension_guards() {
        assert!(builtin("fibonacci").unwrap().into_2d().is_err());
        assert!(builtin("chair").unwrap().into_1d().is_err());
        assert_eq!(builtin("chair").unwrap().dim(), 2);
    }
}
