//! Action discretization over a closed vocabulary.
//!
//! The pitch is cut into a 10×10 grid of 10.5×6.8-yard rectangles; a token is
//! (team flag, action type, grid cell) and its text form is
//! `"<True|False>, <action type>, <bx>, <by>"`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Action, ActionType, PITCH_LENGTH, PITCH_WIDTH};

pub const GRID: u8 = 10;
pub const BIN_LENGTH: f64 = PITCH_LENGTH / GRID as f64;
pub const BIN_WIDTH: f64 = PITCH_WIDTH / GRID as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bin {
    pub bx: u8,
    pub by: u8,
}

impl Bin {
    pub fn new(bx: u8, by: u8) -> Result<Self> {
        if bx >= GRID || by >= GRID {
            return Err(Error::Range(format!("bin ({bx}, {by}) outside the 10x10 grid")));
        }
        Ok(Bin { bx, by })
    }

    /// Center of the rectangle in yards.
    pub fn center(self) -> (f64, f64) {
        (
            self.bx as f64 * BIN_LENGTH + BIN_LENGTH / 2.0,
            self.by as f64 * BIN_WIDTH + BIN_WIDTH / 2.0,
        )
    }
}

/// Grid cell containing `(x, y)`; the far touchline and goal line fall into
/// the last row/column.
pub fn bin_of(x: f64, y: f64) -> Result<Bin> {
    if !(0.0..=PITCH_LENGTH).contains(&x) || !(0.0..=PITCH_WIDTH).contains(&y) {
        return Err(Error::Range(format!("({x}, {y}) is outside the 105x68 pitch")));
    }
    let last = (GRID - 1) as f64;
    Ok(Bin {
        bx: (x / BIN_LENGTH).floor().min(last) as u8,
        by: (y / BIN_WIDTH).floor().min(last) as u8,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub is_home: bool,
    pub action_type: ActionType,
    pub bin: Bin,
}

impl Token {
    /// Action placed at the center of this token's bin.
    pub fn decode(self, match_id: u64, index: usize) -> Action {
        let (x, y) = self.bin.center();
        Action {
            match_id,
            index,
            is_home: self.is_home,
            action_type: self.action_type,
            x,
            y,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let team = if self.is_home { "True" } else { "False" };
        write!(f, "{team}, {}, {}, {}", self.action_type, self.bin.bx, self.bin.by)
    }
}

impl FromStr for Token {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            record: format!("token {s:?}"),
            message: "expected \"<True|False>, <action type>, <bx>, <by>\"".into(),
        };
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [team, kind, bx, by] = parts.as_slice() else {
            return Err(bad());
        };
        let is_home = match *team {
            "True" => true,
            "False" => false,
            _ => return Err(bad()),
        };
        Ok(Token {
            is_home,
            action_type: kind.parse()?,
            bin: Bin::new(bx.parse().map_err(|_| bad())?, by.parse().map_err(|_| bad())?)?,
        })
    }
}

pub fn encode(action: &Action) -> Result<Token> {
    Ok(Token {
        is_home: action.is_home,
        action_type: action.action_type,
        bin: bin_of(action.x, action.y)?,
    })
}

/// Closed token space: team × action type × bin, ordered lexicographically
/// by (team, type position, bx, by) with `False` before `True`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    types: Vec<ActionType>,
    type_pos: HashMap<ActionType, usize>,
}

const CELLS: usize = GRID as usize * GRID as usize;

pub fn build_vocabulary(action_types: &[ActionType]) -> Result<Vocabulary> {
    if action_types.is_empty() {
        return Err(Error::Validation("vocabulary needs at least one action type".into()));
    }
    let mut type_pos = HashMap::new();
    for (i, t) in action_types.iter().enumerate() {
        if type_pos.insert(*t, i).is_some() {
            return Err(Error::Validation(format!("duplicate action type {t}")));
        }
    }
    Ok(Vocabulary {
        types: action_types.to_vec(),
        type_pos,
    })
}

impl Vocabulary {
    /// Vocabulary over every known action type.
    pub fn full() -> Self {
        build_vocabulary(&ActionType::ALL).expect("ActionType::ALL is duplicate-free")
    }

    pub fn len(&self) -> usize {
        2 * self.types.len() * CELLS
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn action_types(&self) -> &[ActionType] {
        &self.types
    }

    pub fn token_to_id(&self, t: &Token) -> Result<u32> {
        let pos = *self
            .type_pos
            .get(&t.action_type)
            .ok_or_else(|| Error::Lookup(format!("action type {} not in vocabulary", t.action_type)))?;
        let team = usize::from(t.is_home);
        let cell = t.bin.bx as usize * GRID as usize + t.bin.by as usize;
        Ok(((team * self.types.len() + pos) * CELLS + cell) as u32)
    }

    pub fn id_to_token(&self, id: u32) -> Result<Token> {
        let id = id as usize;
        if id >= self.len() {
            return Err(Error::Lookup(format!(
                "token id {id} >= vocabulary size {}",
                self.len()
            )));
        }
        let cell = id % CELLS;
        let rest = id / CELLS;
        let pos = rest % self.types.len();
        let team = rest / self.types.len();
        Ok(Token {
            is_home: team == 1,
            action_type: self.types[pos],
            bin: Bin {
                bx: (cell / GRID as usize) as u8,
                by: (cell % GRID as usize) as u8,
            },
        })
    }

    pub fn encode_id(&self, action: &Action) -> Result<u32> {
        self.token_to_id(&encode(action)?)
    }

    pub fn tokens(&self) -> impl Iterator<Item = Token> + '_ {
        (0..self.len() as u32).map(|id| self.id_to_token(id).expect("id in range"))
    }

    /// JSON array of token texts; a token's id is its position.
    pub fn to_json(&self) -> String {
        let texts: Vec<String> = self.tokens().map(|t| t.to_string()).collect();
        serde_json::to_string_pretty(&texts).expect("strings serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let texts: Vec<String> = serde_json::from_str(s).map_err(|e| Error::Parse {
            record: "vocabulary json".into(),
            message: e.to_string(),
        })?;
        let mut types = Vec::new();
        for text in &texts {
            let t: Token = text.parse()?;
            if !types.contains(&t.action_type) {
                types.push(t.action_type);
            }
        }
        let vocab = build_vocabulary(&types)?;
        if vocab.len() != texts.len() {
            return Err(Error::Validation(format!(
                "vocabulary json lists {} tokens, expected {}",
                texts.len(),
                vocab.len()
            )));
        }
        for (id, text) in texts.iter().enumerate() {
            if vocab.id_to_token(id as u32)?.to_string() != *text {
                return Err(Error::Validation(format!("token {text:?} is out of order at id {id}")));
            }
        }
        Ok(vocab)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bin_examples() {
        assert_eq!(bin_of(0.0, 0.0).unwrap(), Bin { bx: 0, by: 0 });
        assert_eq!(bin_of(10.5, 13.6).unwrap(), Bin { bx: 1, by: 2 });
        assert_eq!(bin_of(105.0, 68.0).unwrap(), Bin { bx: 9, by: 9 });
        assert_eq!(bin_of(52.5, 34.0).unwrap(), Bin { bx: 5, by: 5 });
        assert!(matches!(bin_of(-0.1, 3.0), Err(Error::Range(_))));
        assert!(matches!(bin_of(3.0, 68.01), Err(Error::Range(_))));
    }

    #[test]
    fn token_text_matches_reference_format() {
        let dribble = Action {
            match_id: 1,
            index: 0,
            is_home: true,
            action_type: ActionType::Dribble,
            x: 4.5 * BIN_LENGTH,
            y: 4.5 * BIN_WIDTH,
        };
        assert_eq!(encode(&dribble).unwrap().to_string(), "True, dribble, 4, 4");
        let pass = Action {
            is_home: false,
            action_type: ActionType::Pass,
            x: 0.0,
            y: 0.0,
            ..dribble
        };
        assert_eq!(encode(&pass).unwrap().to_string(), "False, pass, 0, 0");
        assert!("True, dribble, 10, 4".parse::<Token>().is_err());
        assert!("Yes, dribble, 1, 4".parse::<Token>().is_err());
    }

    #[test]
    fn vocabulary_sizes() {
        assert_eq!(build_vocabulary(&ActionType::ALL[..13]).unwrap().len(), 2600);
        assert_eq!(build_vocabulary(&[ActionType::Shot]).unwrap().len(), 200);
        assert!(matches!(
            build_vocabulary(&[ActionType::Shot, ActionType::Shot]),
            Err(Error::Validation(_))
        ));
        assert!(build_vocabulary(&[]).is_err());
        assert_eq!(Vocabulary::full(), Vocabulary::full());
    }

    #[test]
    fn vocabulary_order_is_team_type_bx_by() {
        let v = build_vocabulary(&[ActionType::Pass, ActionType::Shot]).unwrap();
        assert_eq!(v.id_to_token(0).unwrap().to_string(), "False, pass, 0, 0");
        assert_eq!(v.id_to_token(1).unwrap().to_string(), "False, pass, 0, 1");
        assert_eq!(v.id_to_token(10).unwrap().to_string(), "False, pass, 1, 0");
        assert_eq!(v.id_to_token(100).unwrap().to_string(), "False, shot, 0, 0");
        assert_eq!(v.id_to_token(399).unwrap().to_string(), "True, shot, 9, 9");
        assert!(v.id_to_token(400).is_err());
    }

    #[test]
    fn id_round_trips_at_edges() {
        let v = Vocabulary::full();
        for id in [0, v.len() as u32 - 1, 1234] {
            assert_eq!(v.token_to_id(&v.id_to_token(id).unwrap()).unwrap(), id);
        }
        let small = build_vocabulary(&[ActionType::Pass]).unwrap();
        let shot = "True, shot, 1, 1".parse::<Token>().unwrap();
        assert!(matches!(small.token_to_id(&shot), Err(Error::Lookup(_))));
    }

    #[test]
    fn json_round_trip_is_stable() {
        let v = build_vocabulary(&[ActionType::Receival, ActionType::Pass]).unwrap();
        let back = Vocabulary::from_json(&v.to_json()).unwrap();
        assert_eq!(back, v);
        for id in 0..v.len() as u32 {
            assert_eq!(back.id_to_token(id).unwrap(), v.id_to_token(id).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn encode_decode_reproduces_token_fields(
            x in 0.0..=105.0f64,
            y in 0.0..=68.0f64,
            home in any::<bool>(),
            t in 0usize..ActionType::ALL.len(),
        ) {
            let a = Action { match_id: 3, index: 0, is_home: home, action_type: ActionType::ALL[t], x, y };
            let tok = encode(&a).unwrap();
            let back = encode(&tok.decode(3, 0)).unwrap();
            prop_assert_eq!(back, tok);
            prop_assert_eq!(tok.to_string().parse::<Token>().unwrap(), tok);
            let v = Vocabulary::full();
            prop_assert_eq!(v.id_to_token(v.token_to_id(&tok).unwrap()).unwrap(), tok);
        }

        #[test]
        fn bins_tile_the_pitch(x in 0.0..=105.0f64, y in 0.0..=68.0f64) {
            let b = bin_of(x, y).unwrap();
            let lo_x = b.bx as f64 * BIN_LENGTH;
            let lo_y = b.by as f64 * BIN_WIDTH;
            prop_assert!(x >= lo_x - 1e-9 && (x < lo_x + BIN_LENGTH + 1e-9));
            prop_assert!(y >= lo_y - 1e-9 && (y < lo_y + BIN_WIDTH + 1e-9));
        }
    }
}
