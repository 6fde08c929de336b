//! Dataset CSV ingestion and emission (RFC-4180 quoting, header row
//! required). Outcomes are written with 17 significant digits so a written
//! file reloads to bit-identical values.

use std::path::Path;

use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::simulate::PotentialOutcomeTable;

fn locate(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::CsvLoad {
            row: 0,
            column: name.to_string(),
            message: "column not found in header".into(),
        })
}

/// Loads a dataset given the cause columns (in topological order) and the
/// outcome column.
pub fn load_csv(path: &Path, causes: &[String], outcome: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Io(e.to_string()))?
        .clone();
    let cause_idx: Vec<usize> = causes
        .iter()
        .map(|c| locate(&headers, c))
        .collect::<Result<_>>()?;
    let outcome_idx = locate(&headers, outcome)?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 1;
        let record = record.map_err(|e| Error::CsvLoad {
            row: row_no,
            column: String::new(),
            message: e.to_string(),
        })?;
        let mut bits = Vec::with_capacity(causes.len());
        for (j, &idx) in cause_idx.iter().enumerate() {
            let field = record.get(idx).unwrap_or("");
            match field {
                "0" => bits.push(0),
                "1" => bits.push(1),
                other => {
                    return Err(Error::CsvLoad {
                        row: row_no,
                        column: causes[j].clone(),
                        message: format!("cause value '{other}' is not 0/1"),
                    });
                }
            }
        }
        let field = record.get(outcome_idx).unwrap_or("");
        let y: f64 = field.parse().map_err(|_| Error::CsvLoad {
            row: row_no,
            column: outcome.to_string(),
            message: format!("outcome '{field}' is not a number"),
        })?;
        if !y.is_finite() {
            return Err(Error::CsvLoad {
                row: row_no,
                column: outcome.to_string(),
                message: "outcome is not finite".into(),
            });
        }
        rows.push((bits, y));
    }
    Dataset::new(causes.to_vec(), outcome.to_string(), rows)
}

fn full_precision(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a dataset with causes as 0/1 and the outcome at full precision.
pub fn write_dataset(data: &Dataset, path: &Path) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut header: Vec<String> = data.cause_names().to_vec();
    header.push(data.outcome_name().to_string());
    writer
        .write_record(&header)
        .map_err(|e| Error::Io(e.to_string()))?;
    for i in 0..data.n() {
        let mut record: Vec<String> = data.row(i).iter().map(|b| b.to_string()).collect();
        record.push(full_precision(data.outcome(i)));
        writer
            .write_record(&record)
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Writes the per-unit ground truth next to the observed data: one potential
/// outcome column per pattern of the outcome parents.
pub fn write_truth(table: &PotentialOutcomeTable, path: &Path) -> Result<()> {
    let spec = table.spec();
    let names = spec.cause_names();
    let pa = spec.graph().parents_of_outcome();
    let patterns = 1usize << pa.len();
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;

    let mut header: Vec<String> = names.to_vec();
    header.push(spec.outcome_name().to_string());
    let mut templates: Vec<Vec<u8>> = Vec::with_capacity(patterns);
    for code in 0..patterns {
        let mut x = vec![0u8; spec.p()];
        let mut label = String::from("Y");
        for (j, &idx) in pa.iter().enumerate() {
            let bit = ((code >> (pa.len() - 1 - j)) & 1) as u8;
            x[idx] = bit;
            label.push('_');
            label.push_str(&names[idx]);
            label.push(char::from(b'0' + bit));
        }
        header.push(label);
        templates.push(x);
    }
    writer
        .write_record(&header)
        .map_err(|e| Error::Io(e.to_string()))?;

    for i in 0..table.len() {
        let mut record: Vec<String> = table
            .observed_causes(i)
            .iter()
            .map(|b| b.to_string())
            .collect();
        record.push(full_precision(table.observed_outcome(i)));
        for x in &templates {
            record.push(full_precision(table.outcome_po(i, x)));
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{generate, ScmSpec};

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut dir = std::env::temp_dir();
        dir.push(format!("postcause-test-{}-{name}", std::process::id()));
        dir
    }

    #[test]
    fn loads_a_small_file() {
        let path = tmp("small.csv");
        std::fs::write(&path, "A,B,Y\n0,1,1.5\n1,0,2.5\n1,1,3.5\n").unwrap();
        let data = load_csv(&path, &["A".into(), "B".into()], "Y").unwrap();
        assert_eq!(data.n(), 3);
        assert_eq!(data.row(0), &[0, 1]);
        assert_eq!(data.outcome(2), 3.5);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_values_name_row_and_column() {
        let path = tmp("bad-cause.csv");
        std::fs::write(&path, "A,Y\n0,1.0\n2,2.0\n").unwrap();
        match load_csv(&path, &["A".into()], "Y") {
            Err(Error::CsvLoad { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "A");
            }
            other => panic!("expected load error, got {other:?}"),
        }
        std::fs::write(&path, "A,Y\n0,abc\n").unwrap();
        match load_csv(&path, &["A".into()], "Y") {
            Err(Error::CsvLoad { row, column, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(column, "Y");
            }
            other => panic!("expected load error, got {other:?}"),
        }
        std::fs::write(&path, "A,Y\n0,1.0\n").unwrap();
        assert!(matches!(
            load_csv(&path, &["A".into(), "B".into()], "Y"),
            Err(Error::CsvLoad { .. })
        ));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn written_data_reloads_bit_identically() {
        let spec = ScmSpec::chain_mediation();
        let (data, _) = generate(&spec, 500, 77).unwrap();
        let path = tmp("roundtrip.csv");
        write_dataset(&data, &path).unwrap();
        let back = load_csv(&path, &data.cause_names().to_vec(), data.outcome_name()).unwrap();
        assert_eq!(back.n(), data.n());
        for i in 0..data.n() {
            assert_eq!(back.row(i), data.row(i));
            assert_eq!(back.outcome(i).to_bits(), data.outcome(i).to_bits());
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn truth_file_has_one_column_per_parent_pattern() {
        let spec = ScmSpec::ntp_like();
        let (_, table) = generate(&spec, 50, 5).unwrap();
        let path = tmp("truth.csv");
        write_truth(&table, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "Sex,Dose,Path,Weight,Y_Sex0_Path0,Y_Sex0_Path1,Y_Sex1_Path0,Y_Sex1_Path1"
        );
        assert_eq!(text.lines().count(), 51);
        std::fs::remove_file(&path).ok();
    }
}
