//! BER table in CSV form: one row per SNR point per sweep.

use crate::channel::ChannelKind;
use crate::link::BerPoint;
use crate::modem::Modulation;

use super::CliError;

pub const HEADER: &str = "snr_db,ebn0_db,channel,modulation,coding,bits,errors,ber";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub snr_db: f64,
    pub ebn0_db: f64,
    pub channel: ChannelKind,
    pub modulation: Modulation,
    pub coding: bool,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
}

impl Row {
    pub fn from_point(p: &BerPoint, channel: ChannelKind, modulation: Modulation, coding: bool) -> Self {
        Self {
            snr_db: p.snr_db,
            ebn0_db: p.ebn0_db,
            channel,
            modulation,
            coding,
            bits: p.bits_simulated,
            errors: p.bit_errors,
            ber: p.ber,
        }
    }

    /// Floats use the shortest text that parses back to the same value, except
    /// `ber`, which is printed in scientific form with 7 significant digits.
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.6e}",
            self.snr_db,
            self.ebn0_db,
            self.channel,
            self.modulation,
            if self.coding { "on" } else { "off" },
            self.bits,
            self.errors,
            self.ber
        )
    }
}

pub fn render(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

fn parse_line(line: &str) -> Result<Row, String> {
    let fields: Vec<&str> = line.split(',').collect();
    let [snr, ebn0, channel, modulation, coding, bits, errors, ber] = fields[..] else {
        return Err(format!("expected 8 fields, found {}", fields.len()));
    };
    let real = |name: &str, v: &str| -> Result<f64, String> {
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("{name} {v:?} is not a finite number"))
    };
    let count = |name: &str, v: &str| -> Result<u64, String> {
        v.parse::<u64>().map_err(|_| format!("{name} {v:?} is not a non-negative integer"))
    };
    let row = Row {
        snr_db: real("snr_db", snr)?,
        ebn0_db: real("ebn0_db", ebn0)?,
        channel: channel.parse()?,
        modulation: modulation.parse()?,
        coding: match coding {
            "on" => true,
            "off" => false,
            other => return Err(format!("coding {other:?} is not on/off")),
        },
        bits: count("bits", bits)?,
        errors: count("errors", errors)?,
        ber: real("ber", ber)?,
    };
    if row.bits == 0 {
        return Err("bits is 0".into());
    }
    if row.errors > row.bits {
        return Err(format!("errors {} exceed bits {}", row.errors, row.bits));
    }
    if !(0.0..=1.0).contains(&row.ber) {
        return Err(format!("ber {} outside [0, 1]", row.ber));
    }
    Ok(row)
}

/// Parses a table written by [`render`]. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<Vec<Row>, CliError> {
    let malformed = |line: usize, msg: String| CliError::MalformedCsv { line, msg };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end_matches('\r') == HEADER => {}
        Some(h) => return Err(malformed(1, format!("expected header {HEADER:?}, found {h:?}"))),
        None => return Err(malformed(1, "file is empty".into())),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l.trim_end_matches('\r')).map_err(|m| malformed(i + 2, m)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(errors: u64, bits: u64) -> Row {
        Row {
            snr_db: 3.5,
            ebn0_db: 2.530899869919435,
            channel: ChannelKind::Rician,
            modulation: Modulation::Qam16,
            coding: true,
            bits,
            errors,
            ber: errors as f64 / bits as f64,
        }
    }

    #[test]
    fn line_format() {
        assert_eq!(row(7, 44000).to_line(), "3.5,2.530899869919435,rician,16qam,on,44000,7,1.590909e-4");
        assert_eq!(row(0, 44000).to_line(), "3.5,2.530899869919435,rician,16qam,on,44000,0,0.000000e0");
    }

    #[test]
    fn malformed_lines_report_position() {
        let good = render(&[row(1, 10), row(2, 10)]);
        assert_eq!(parse(&good).unwrap().len(), 2);
        let cases = [
            ("snr_db,ber\n", 1),
            ("", 1),
            (&format!("{good}1,2,awgn,qpsk,on,10,1\n") as &str, 4),
            (&format!("{good}x,2,awgn,qpsk,on,10,1,0.1\n"), 4),
            (&format!("{HEADER}\n1,2,mars,qpsk,on,10,1,0.1\n"), 2),
            (&format!("{HEADER}\n1,2,awgn,qpsk,on,10,11,0.1\n"), 2),
            (&format!("{HEADER}\n1,2,awgn,qpsk,yes,10,1,0.1\n"), 2),
            (&format!("{HEADER}\n1,2,awgn,qpsk,on,-3,1,0.1\n"), 2),
        ];
        for (text, expected) in cases {
            match parse(text) {
                Err(CliError::MalformedCsv { line, .. }) => assert_eq!(line, expected, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip_to_printed_precision(
            snr in -10.0f64..60.0,
            offset in -5.0f64..5.0,
            bits in 1u64..100_000_000,
            frac in 0.0f64..=1.0,
        ) {
            let errors = (bits as f64 * frac) as u64;
            let mut r = row(errors, bits);
            r.snr_db = snr;
            r.ebn0_db = snr + offset;
            let back = parse(&render(&[r])).unwrap()[0];
            prop_assert_eq!(back.snr_db, r.snr_db);
            prop_assert_eq!(back.ebn0_db, r.ebn0_db);
            prop_assert_eq!((back.bits, back.errors), (r.bits, r.errors));
            prop_assert!((back.ber - r.ber).abs() <= 5e-7 * r.ber);
            prop_assert_eq!(back.ber == 0.0, r.errors == 0);
        }
    }
}
