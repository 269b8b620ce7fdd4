//! Readers and writers for LIBSVM datasets, PGM images and plain series.

use std::io::Write;
use std::path::Path;

use super::image::GrayImage;
use crate::error::{Error, Result};
use crate::linops::DenseMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parsed LIBSVM file: dense features and raw labels.
#[derive(Debug, Clone)]
pub struct LibsvmData {
    pub features: DenseMatrix,
    pub labels: Vec<f64>,
}

impl LibsvmData {
    /// Maps labels to `{-1, +1}` (`> 0` becomes `+1`).
    pub fn signed_labels(&self) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&y| if y > 0.0 { 1.0 } else { -1.0 })
            .collect()
    }
}

pub fn read_libsvm(path: impl AsRef<Path>) -> Result<LibsvmData> {
    parse_libsvm(&std::fs::read_to_string(path)?)
}

/// `label idx:value ...` with 1-based feature indices; `#` starts a comment.
pub fn parse_libsvm(text: &str) -> Result<LibsvmData> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let label_tok = toks.next().expect("nonempty line");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno + 1, format!("bad label {label_tok:?}")))?;
        let mut row = Vec::new();
        for tok in toks {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno + 1, format!("expected idx:value, got {tok:?}")))?;
            let idx: usize = i
                .parse()
                .map_err(|_| parse_err(lineno + 1, format!("bad index {i:?}")))?;
            if idx == 0 {
                return Err(parse_err(lineno + 1, "feature indices are 1-based"));
            }
            let val: f64 = v
                .parse()
                .map_err(|_| parse_err(lineno + 1, format!("bad value {v:?}")))?;
            dim = dim.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(label);
        rows.push(row);
    }
    let mut data = vec![0.0; rows.len() * dim];
    for (r, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            data[r * dim + j] = v;
        }
    }
    Ok(LibsvmData {
        features: DenseMatrix::from_row_major(rows.len(), dim, data)?,
        labels,
    })
}

pub fn read_series(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_series(&std::fs::read_to_string(path)?)
}

/// One number per line; blank lines and `#` comments are skipped.
pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(
            line.parse()
                .map_err(|_| parse_err(lineno + 1, format!("bad value {line:?}")))?,
        );
    }
    Ok(out)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_pgm(&std::fs::read(path)?)
}

/// Decodes binary (`P5`) or ASCII (`P2`) PGM into `[0, 1]` intensities.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let mut line = 1;
    let mut header = Vec::with_capacity(4);
    while header.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b'\n' => {
                    line += 1;
                    pos += 1;
                }
                c if c.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(parse_err(line, "truncated PGM header"));
        }
        header.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    let magic = header[0].as_str();
    let num = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| parse_err(line, format!("bad header field {s:?}")))
    };
    let (width, height, maxval) = (num(&header[1])?, num(&header[2])?, num(&header[3])?);
    if maxval == 0 || maxval > 65535 {
        return Err(parse_err(line, format!("maxval {maxval} out of range")));
    }
    let n = width * height;
    let scale = maxval as f64;
    let pixels = match magic {
        "P5" => {
            // exactly one whitespace byte separates the header from raster
            pos += 1;
            let bpp = if maxval < 256 { 1 } else { 2 };
            let raster = bytes
                .get(pos..pos + n * bpp)
                .ok_or_else(|| parse_err(line, "truncated PGM raster"))?;
            if bpp == 1 {
                raster.iter().map(|&b| b as f64 / scale).collect()
            } else {
                raster
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale)
                    .collect()
            }
        }
        "P2" => {
            let text = String::from_utf8_lossy(&bytes[pos..]);
            let mut vals = Vec::with_capacity(n);
            for (i, l) in text.lines().enumerate() {
                let l = l.split('#').next().unwrap_or("");
                for tok in l.split_whitespace() {
                    let v: usize = tok
                        .parse()
                        .map_err(|_| parse_err(line + i, format!("bad pixel {tok:?}")))?;
                    vals.push(v as f64 / scale);
                }
            }
            if vals.len() < n {
                return Err(parse_err(line, "truncated PGM raster"));
            }
            vals.truncate(n);
            vals
        }
        other => return Err(parse_err(1, format!("unsupported magic {other:?}"))),
    };
    GrayImage::new(height, width, pixels)
}

/// Writes `image` as 8-bit binary PGM, clamping to `[0, 1]`.
pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&encode_pgm(image))?;
    f.flush()?;
    Ok(())
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(
        image
            .pixels
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    out
}

/// Writes `image` as ASCII PGM.
pub fn encode_pgm_ascii(image: &GrayImage) -> String {
    let mut s = format!("P2\n{} {}\n255\n", image.width, image.height);
    for row in image.pixels.chunks(image.width.max(1)) {
        let line: Vec<String> = row
            .iter()
            .map(|v| ((v.clamp(0.0, 1.0) * 255.0).round() as u8).to_string())
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn libsvm_roundtrip() {
        let d = parse_libsvm("+1 1:0.5 3:2\n-1 2:1 # comment\n\n").unwrap();
        assert_eq!((d.features.rows(), d.features.cols()), (2, 3));
        assert_eq!(d.features.get(0, 2), 2.0);
        assert_eq!(d.features.get(1, 1), 1.0);
        assert_eq!(d.signed_labels(), vec![1.0, -1.0]);
        match parse_libsvm("1 1:2\n1 0:1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_libsvm("1 x\n").is_err());
    }

    #[test]
    fn pgm_roundtrip_both_encodings() {
        let img = GrayImage::new(2, 3, vec![0.0, 1.0, 0.2, 0.4, 0.6, 0.8]).unwrap();
        let back = decode_pgm(&encode_pgm(&img)).unwrap();
        let ascii = decode_pgm(encode_pgm_ascii(&img).as_bytes()).unwrap();
        for dec in [back, ascii] {
            assert_eq!((dec.height, dec.width), (2, 3));
            for (a, b) in dec.pixels.iter().zip(&img.pixels) {
                assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
            }
        }
        assert!(decode_pgm(b"P5\n2 2\n255\n\x01").is_err());
        assert!(decode_pgm(b"P7\n1 1\n255\n\x01").is_err());
    }

    #[test]
    fn pgm_header_comments_and_16_bit() {
        let mut bytes = b"P5\n# made by hand\n1 1\n65535\n".to_vec();
        bytes.extend([0xff, 0xff]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.pixels, vec![1.0]);
    }

    #[test]
    fn series_reader() {
        assert_eq!(
            parse_series("1\n\n2.5\n# c\n-3\n").unwrap(),
            vec![1.0, 2.5, -3.0]
        );
        match parse_series("1\nfoo\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
