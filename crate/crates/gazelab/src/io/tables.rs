//! CSV tables: preference ratings, expert ranking ballots, and eight-criterion
//! Likert responses.

use std::collections::BTreeSet;

use crate::io::{IoError, utf8};
use crate::model::{LikedFeature, ModelError, RankingBallot, RatingRecord, LIKERT_CRITERIA};

const RATINGS_HEADER: [&str; 5] = [
    "participant_id",
    "image_id",
    "rating",
    "liked_features",
    "thought",
];

/// One expert's raw eight-criterion scores for one rendering, in
/// [`LIKERT_CRITERIA`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LikertRow {
    pub expert_id: String,
    pub rendering_id: String,
    pub scores: [u8; 8],
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(bytes)
}

fn csv_error(err: csv::Error) -> IoError {
    let line = err
        .position()
        .map(|p| p.line())
        .unwrap_or(1);
    IoError::Malformed {
        line,
        message: err.to_string(),
    }
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn check_header(got: &csv::StringRecord, want: &[&str]) -> Result<(), IoError> {
    let got_fields: Vec<&str> = got.iter().collect();
    if got_fields != want {
        return Err(IoError::Malformed {
            line: 1,
            message: format!(
                "expected header `{}`, got `{}`",
                want.join(","),
                got_fields.join(",")
            ),
        });
    }
    Ok(())
}

fn field<'r>(record: &'r csv::StringRecord, idx: usize, line: u64) -> Result<&'r str, IoError> {
    record.get(idx).ok_or(IoError::Malformed {
        line,
        message: format!("missing column {}", idx + 1),
    })
}

/// Parses the ratings table: `participant_id,image_id,rating,liked_features,thought`
/// with `liked_features` a semicolon-joined subset of the fixed vocabulary.
pub fn parse_ratings(bytes: &[u8]) -> Result<Vec<RatingRecord>, IoError> {
    utf8(bytes)?;
    let mut rdr = reader(bytes);
    check_header(rdr.headers().map_err(csv_error)?, &RATINGS_HEADER)?;
    let mut out = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(csv_error)?;
        let line = record_line(&record);
        let rating: i64 = field(&record, 2, line)?.parse().map_err(|_| IoError::Malformed {
            line,
            message: format!("rating `{}` is not an integer", &record[2]),
        })?;
        if !(1..=5).contains(&rating) {
            return Err(IoError::Invalid {
                line,
                source: ModelError::RatingOutOfRange(rating),
            });
        }
        let mut features = BTreeSet::new();
        for token in field(&record, 3, line)?.split(';') {
            if token.trim().is_empty() {
                continue;
            }
            let feature = LikedFeature::parse(token)
                .map_err(|source| IoError::Invalid { line, source })?;
            features.insert(feature);
        }
        let thought = match field(&record, 4, line)? {
            "" => None,
            text => Some(text.to_string()),
        };
        let record = RatingRecord::new(
            field(&record, 0, line)?,
            field(&record, 1, line)?,
            rating as u8,
            features,
            thought,
        )
        .map_err(|source| IoError::Invalid { line, source })?;
        out.push(record);
    }
    Ok(out)
}

/// Serializes ratings back to the canonical CSV layout. Features are written
/// in the vocabulary's sorted order, so output is stable.
pub fn write_ratings(records: &[RatingRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RATINGS_HEADER).expect("write to Vec");
    for r in records {
        let features: Vec<&str> = r.liked_features.iter().map(|f| f.as_str()).collect();
        w.write_record([
            r.participant_id.as_str(),
            r.image_id.as_str(),
            &r.rating.to_string(),
            &features.join(";"),
            r.thought.as_deref().unwrap_or(""),
        ])
        .expect("write to Vec");
    }
    w.into_inner().expect("flush to Vec")
}

/// Parses ballots: `expert_id,problem_id,rank1,...,rankN` with rank1 = best.
/// Every row must place a distinct candidate at every rank.
pub fn parse_ballots(bytes: &[u8]) -> Result<Vec<RankingBallot>, IoError> {
    utf8(bytes)?;
    let mut rdr = reader(bytes);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let fields: Vec<&str> = headers.iter().collect();
    if fields.len() < 4 || fields[0] != "expert_id" || fields[1] != "problem_id" {
        return Err(IoError::Malformed {
            line: 1,
            message: format!(
                "expected header `expert_id,problem_id,rank1,...`, got `{}`",
                fields.join(",")
            ),
        });
    }
    for (i, name) in fields[2..].iter().enumerate() {
        let want = format!("rank{}", i + 1);
        if *name != want {
            return Err(IoError::Malformed {
                line: 1,
                message: format!("rank column {} is named `{name}`, expected `{want}`", i + 3),
            });
        }
    }
    let ranks = fields.len() - 2;
    let mut out = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(csv_error)?;
        let line = record_line(&record);
        let mut order = Vec::with_capacity(ranks);
        for i in 0..ranks {
            let candidate = field(&record, 2 + i, line)?;
            if candidate.is_empty() {
                return Err(IoError::Malformed {
                    line,
                    message: format!("missing candidate at rank{}", i + 1),
                });
            }
            order.push(candidate.to_string());
        }
        let ballot = RankingBallot::new(field(&record, 0, line)?, field(&record, 1, line)?, order)
            .map_err(|source| IoError::Invalid { line, source })?;
        out.push(ballot);
    }
    Ok(out)
}

/// Serializes ballots. All ballots must rank the same number of candidates,
/// because the rank columns live in the header.
pub fn write_ballots(ballots: &[RankingBallot]) -> Result<Vec<u8>, IoError> {
    let ranks = ballots.first().map(|b| b.order().len()).unwrap_or(4);
    if ballots.iter().any(|b| b.order().len() != ranks) {
        return Err(IoError::MixedBallotArity);
    }
    let mut header = vec!["expert_id".to_string(), "problem_id".to_string()];
    header.extend((1..=ranks).map(|i| format!("rank{i}")));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("write to Vec");
    for b in ballots {
        let mut row = vec![b.expert_id.as_str(), b.problem_id.as_str()];
        row.extend(b.order().iter().map(String::as_str));
        w.write_record(&row).expect("write to Vec");
    }
    Ok(w.into_inner().expect("flush to Vec"))
}

/// Parses the Likert table: `expert_id,rendering_id` followed by the eight
/// criterion columns in their fixed order.
pub fn parse_likert(bytes: &[u8]) -> Result<Vec<LikertRow>, IoError> {
    utf8(bytes)?;
    let mut rdr = reader(bytes);
    let mut want = vec!["expert_id", "rendering_id"];
    want.extend_from_slice(&LIKERT_CRITERIA);
    check_header(rdr.headers().map_err(csv_error)?, &want)?;
    let mut out = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(csv_error)?;
        let line = record_line(&record);
        let mut scores = [0u8; 8];
        for (i, slot) in scores.iter_mut().enumerate() {
            let raw = field(&record, 2 + i, line)?;
            let score: i64 = raw.parse().map_err(|_| IoError::Malformed {
                line,
                message: format!("score `{raw}` for {} is not an integer", LIKERT_CRITERIA[i]),
            })?;
            if !(1..=5).contains(&score) {
                return Err(IoError::Invalid {
                    line,
                    source: ModelError::RatingOutOfRange(score),
                });
            }
            *slot = score as u8;
        }
        out.push(LikertRow {
            expert_id: field(&record, 0, line)?.to_string(),
            rendering_id: field(&record, 1, line)?.to_string(),
            scores,
        });
    }
    Ok(out)
}

/// Serializes Likert rows with the canonical header.
pub fn write_likert(rows: &[LikertRow]) -> Vec<u8> {
    let mut header = vec!["expert_id", "rendering_id"];
    header.extend_from_slice(&LIKERT_CRITERIA);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("write to Vec");
    for row in rows {
        let mut fields = vec![row.expert_id.clone(), row.rendering_id.clone()];
        fields.extend(row.scores.iter().map(|s| s.to_string()));
        w.write_record(&fields).expect("write to Vec");
    }
    w.into_inner().expect("flush to Vec")
}

#[cfg(test)]
mod tests {
    use super::*;

    const RATINGS: &str = "participant_id,image_id,rating,liked_features,thought\n\
        p1,img001,5,colour;shape,calm and bright\n\
        p2,img002,3,,\n";

    #[test]
    fn parse_ratings_basic() {
        let records = parse_ratings(RATINGS.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].rating, 5);
        assert_eq!(records[0].liked_features.len(), 2);
        assert!(records[0].liked_features.contains(&LikedFeature::Colour));
        assert_eq!(records[0].thought.as_deref(), Some("calm and bright"));
        assert!(records[1].liked_features.is_empty());
        assert_eq!(records[1].thought, None);
    }

    #[test]
    fn rating_out_of_range_names_its_line() {
        let text = RATINGS.replace("p2,img002,3", "p2,img002,6");
        let err = parse_ratings(text.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(err.to_string().contains("1..=5"));
    }

    #[test]
    fn unknown_feature_rejected() {
        let text = RATINGS.replace("colour;shape", "colour;smell");
        let err = parse_ratings(text.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(err.to_string().contains("smell"));
    }

    #[test]
    fn ratings_header_checked() {
        let err = parse_ratings(b"who,what\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
    }

    #[test]
    fn ratings_roundtrip() {
        let records = parse_ratings(RATINGS.as_bytes()).unwrap();
        let written = write_ratings(&records);
        assert_eq!(parse_ratings(&written).unwrap(), records);
    }

    const BALLOTS: &str = "expert_id,problem_id,rank1,rank2,rank3,rank4\n\
        e1,S1,RD,RC,RA,RB\n";

    #[test]
    fn parse_ballots_basic() {
        let ballots = parse_ballots(BALLOTS.as_bytes()).unwrap();
        assert_eq!(ballots.len(), 1);
        assert_eq!(ballots[0].order(), ["RD", "RC", "RA", "RB"]);
    }

    #[test]
    fn repeated_candidate_rejected() {
        let text = BALLOTS.replace("RD,RC,RA,RB", "RD,RD,RA,RB");
        let err = parse_ballots(text.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(2));
    }

    #[test]
    fn missing_candidate_rejected() {
        let text = BALLOTS.replace("RD,RC,RA,RB", "RD,,RA,RB");
        let err = parse_ballots(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("rank2"));
    }

    #[test]
    fn fifty_rows_fifty_ballots() {
        let mut text = String::from("expert_id,problem_id,rank1,rank2,rank3,rank4\n");
        for i in 0..50 {
            text.push_str(&format!("e{i},S1,RD,RC,RA,RB\n"));
        }
        assert_eq!(parse_ballots(text.as_bytes()).unwrap().len(), 50);
    }

    #[test]
    fn ballots_roundtrip() {
        let ballots = parse_ballots(BALLOTS.as_bytes()).unwrap();
        let written = write_ballots(&ballots).unwrap();
        assert_eq!(parse_ballots(&written).unwrap(), ballots);
    }

    fn likert_text() -> String {
        format!(
            "expert_id,rendering_id,{}\ne1,RD,5,4,5,3,4,5,2,4\n",
            LIKERT_CRITERIA.join(",")
        )
    }

    #[test]
    fn parse_likert_basic() {
        let rows = parse_likert(likert_text().as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].scores, [5, 4, 5, 3, 4, 5, 2, 4]);
    }

    #[test]
    fn likert_short_row_rejected() {
        let text = likert_text().replace("5,4,5,3,4,5,2,4", "5,4,5,3,4");
        let err = parse_likert(text.as_bytes()).unwrap_err();
        assert_eq!(err.line(), Some(2));
    }

    #[test]
    fn likert_score_range_checked() {
        let text = likert_text().replace("5,4,5,3,4,5,2,4", "5,4,5,3,4,5,2,9");
        let err = parse_likert(text.as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::Invalid { line: 2, .. }));
    }

    #[test]
    fn likert_roundtrip() {
        let rows = parse_likert(likert_text().as_bytes()).unwrap();
        let written = write_likert(&rows);
        assert_eq!(parse_likert(&written).unwrap(), rows);
    }
}
