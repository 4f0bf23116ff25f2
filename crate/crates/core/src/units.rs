//! Unit-level outcome CSV: header `unit_id,arm,<metric1>,...,<metricN>`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::experiment::{MetricSchema, UnitOutcomes};

/// Parses unit-level outcomes, returning the metric schema taken from the header.
pub fn read_units<R: Read>(reader: R) -> Result<(MetricSchema, Vec<UnitOutcomes>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 3 || &headers[0] != "unit_id" || &headers[1] != "arm" {
        return Err(Error::Parse(
            "unit CSV header must be `unit_id,arm,<metric1>,...`".into(),
        ));
    }
    let schema = MetricSchema::new(headers.iter().skip(2));
    let mut units = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let arm = row[1]
            .parse()
            .map_err(|e: Error| Error::Parse(format!("line {line}: {e}")))?;
        let outcomes = row
            .iter()
            .skip(2)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse(format!("line {line}: bad outcome {v:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        units.push(UnitOutcomes::new(&row[0], arm, outcomes));
    }
    Ok((schema, units))
}

pub fn write_units<W: Write>(
    writer: W,
    schema: &MetricSchema,
    units: &[UnitOutcomes],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["unit_id".to_string(), "arm".to_string()];
    header.extend(schema.names.iter().cloned());
    w.write_record(&header)?;
    for u in units {
        let mut row = vec![u.unit_id.clone(), u.arm.as_str().to_string()];
        row.extend(u.outcomes.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
