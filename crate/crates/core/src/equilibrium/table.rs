use super::FiniteGameView;
use crate::error::{Error, Result};

/// Two-player game given by a payoff table, `payoffs[a][b] = (u_1, u_2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableGame {
    pub payoffs: Vec<Vec<(i64, i64)>>,
}

impl TableGame {
    pub fn new(payoffs: Vec<Vec<(i64, i64)>>) -> Result<Self> {
        let rows = payoffs.len();
        if rows == 0 || payoffs.iter().any(|r| r.is_empty() || r.len() != payoffs[0].len()) {
            return Err(Error::DimensionMismatch(
                "payoff table must be a nonempty rectangle".into(),
            ));
        }
        Ok(TableGame { payoffs })
    }

    /// Identical-interest game on actions `a, b, c, d` (indices 0..4):
    /// both players get 2 when both play in `{c, d}`, 1 on `(b, b)`, else 0.
    ///
    /// `(a, a)` is Nash but not recursive, `(b, b)` is strict, `(c, c)` is
    /// Nash, recursive and not strict.
    pub fn identical_interest_example() -> Self {
        let u = |x: usize, y: usize| {
            if x >= 2 && y >= 2 {
                2
            } else if x == 1 && y == 1 {
                1
            } else {
                0
            }
        };
        TableGame {
            payoffs: (0..4).map(|x| (0..4).map(|y| (u(x, y), u(x, y))).collect()).collect(),
        }
    }

    fn payoff(&self, player: usize, profile: &[usize; 2]) -> i64 {
        let (a, b) = self.payoffs[profile[0]][profile[1]];
        if player == 0 {
            a
        } else {
            b
        }
    }
}

impl FiniteGameView for TableGame {
    type Action = usize;
    type Profile = [usize; 2];

    fn players(&self) -> usize {
        2
    }

    fn action_count(&self, player: usize) -> u128 {
        if player == 0 {
            self.payoffs.len() as u128
        } else {
            self.payoffs[0].len() as u128
        }
    }

    fn action_of(&self, profile: &[usize; 2], player: usize) -> usize {
        profile[player]
    }

    fn best_responses(&self, profile: &[usize; 2], player: usize, cap: usize) -> Result<Vec<usize>> {
        let value = |a: usize| {
            let mut p = *profile;
            p[player] = a;
            self.payoff(player, &p)
        };
        let actions = 0..self.action_count(player) as usize;
        let best = actions.clone().map(value).max().expect("nonempty action set");
        let all: Vec<usize> = actions.filter(|&a| value(a) == best).collect();
        if all.len() > cap {
            return Err(Error::BudgetExceeded { cap });
        }
        Ok(all)
    }

    fn deviate(&self, profile: &[usize; 2], player: usize, action: usize) -> Result<[usize; 2]> {
        let mut p = *profile;
        p[player] = action;
        Ok(p)
    }
}
