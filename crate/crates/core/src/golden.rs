//! Published exact counts bundled with the crate.

use crate::exact::Series;

const TABLES: [(&str, &str); 10] = [
    ("sq-saw-spanning", include_str!("../data/sq-saw-spanning.txt")),
    ("sq-sap-crossing", include_str!("../data/sq-sap-crossing.txt")),
    ("hex-rhombus-saw", include_str!("../data/hex-rhombus-saw.txt")),
    ("hex-rhombus-span", include_str!("../data/hex-rhombus-span.txt")),
    ("hex-rhombus-sap", include_str!("../data/hex-rhombus-sap.txt")),
    ("hex-triangle-saw", include_str!("../data/hex-triangle-saw.txt")),
    ("hex-triangle-saw-top", include_str!("../data/hex-triangle-saw-top.txt")),
    ("hex-triangle-sap", include_str!("../data/hex-triangle-sap.txt")),
    ("hex-triangle-sap-top", include_str!("../data/hex-triangle-sap-top.txt")),
    ("hex-square-saw", include_str!("../data/hex-square-saw.txt")),
];

/// Problem ids with a bundled table.
pub fn ids() -> impl Iterator<Item = &'static str> {
    TABLES.iter().map(|(id, _)| *id)
}

pub fn series(id: &str) -> Option<Series> {
    let (_, text) = TABLES.iter().find(|(name, _)| *name == id)?;
    Some(Series::parse(text).expect("bundled table parses"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ProblemSpec;

    #[test]
    fn tables_parse_and_match_ids() {
        for id in ids() {
            let s = series(id).unwrap();
            assert_eq!(s.problem, id);
            assert!(id.parse::<ProblemSpec>().is_ok());
            assert_eq!(s.sizes(), (1..=s.entries.len()).collect::<Vec<_>>());
        }
        assert!(series("sq-saw-crossing").is_none());
    }
}
