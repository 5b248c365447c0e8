//! Chart identifiers: `<M>_<YYYY>_<MM>_<DD>_<HH>_<mm>_<ss>_<r>_<Code>`.

use std::collections::HashSet;

use chrono::{Duration, NaiveDateTime};
use rand::Rng;

use super::subtype::ChartSubtype;

pub fn format_chart_id(machine: char, clock: NaiveDateTime, r: u8, subtype: ChartSubtype) -> String {
    format!("{machine}_{}_{r}_{}", clock.format("%Y_%m_%d_%H_%M_%S"), subtype.code())
}

/// Mints an id with a uniformly drawn random digit.
pub fn make_chart_id<R: Rng + ?Sized>(clock: NaiveDateTime, rng: &mut R, subtype: ChartSubtype, machine: char) -> String {
    format_chart_id(machine, clock, rng.gen_range(0..10), subtype)
}

/// Checks the id format without a regex dependency.
pub fn is_valid_chart_id(id: &str) -> bool {
    let parts: Vec<&str> = id.splitn(9, '_').collect();
    if parts.len() != 9 {
        return false;
    }
    let digits = |s: &str, n: usize| s.len() == n && s.bytes().all(|b| b.is_ascii_digit());
    let m = parts[0].as_bytes();
    m.len() == 1
        && m[0].is_ascii_uppercase()
        && digits(parts[1], 4)
        && parts[2..7].iter().all(|p| digits(p, 2))
        && digits(parts[7], 1)
        && !parts[8].is_empty()
        && parts[8].bytes().all(|b| b.is_ascii_alphabetic() || b == b'-')
}

/// Issues unique chart ids. On collision the random digit is redrawn; once all
/// ten digits of a second are taken the clock moves forward one second.
#[derive(Debug, Clone)]
pub struct ChartIdMinter {
    machine: char,
    issued: HashSet<String>,
}

impl ChartIdMinter {
    pub fn new(machine: char) -> Self {
        ChartIdMinter { machine, issued: HashSet::new() }
    }

    pub fn mint<R: Rng + ?Sized>(&mut self, clock: NaiveDateTime, subtype: ChartSubtype, rng: &mut R) -> String {
        let mut clock = clock;
        loop {
            let first: u8 = rng.gen_range(0..10);
            for k in 0..10 {
                let id = format_chart_id(self.machine, clock, (first + k) % 10, subtype);
                if self.issued.insert(id.clone()) {
                    return id;
                }
            }
            clock += Duration::seconds(1);
        }
    }

    /// Records an id minted elsewhere; returns false if it was already taken.
    pub fn reserve(&mut self, id: &str) -> bool {
        self.issued.insert(id.to_string())
    }

    pub fn len(&self) -> usize {
        self.issued.len()
    }

    pub fn is_empty(&self) -> bool {
        self.issued.is_empty()
    }
}
