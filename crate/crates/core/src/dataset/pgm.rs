//! PGM (netpbm grayscale) reader and writer.
//!
//! Supports P2 (ASCII) and P5 (binary) with maxval up to 255. `#` comments are
//! allowed anywhere in the header. Images are written back as P5 with
//! maxval 255, which round-trips bit-exactly.

use std::path::Path;

use crate::dataset::GrayImage;
use crate::error::{Error, Result};

pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes, path)
}

pub fn save_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    std::fs::write(path, encode_p5(img)).map_err(|e| Error::io(path, e))
}

pub fn encode_p5(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

fn parse_pgm(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = cursor
        .next_token()
        .ok_or_else(|| format_err(path, "missing magic number"))?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        other => {
            return Err(format_err(
                path,
                &format!("unsupported magic {:?}", String::from_utf8_lossy(other)),
            ))
        }
    };

    let width = cursor.next_number(path, "width")?;
    let height = cursor.next_number(path, "height")?;
    let maxval = cursor.next_number(path, "maxval")?;
    if width == 0 || height == 0 {
        return Err(format_err(path, "zero width or height"));
    }
    if maxval > 255 {
        return Err(Error::PgmMaxval {
            path: path.to_path_buf(),
            maxval: maxval as u32,
        });
    }
    if maxval == 0 {
        return Err(format_err(path, "maxval must be positive"));
    }

    let count = width * height;
    let pixels = if binary {
        // Exactly one whitespace byte separates the maxval token from the
        // payload.
        cursor.pos += 1;
        let payload = &bytes[cursor.pos.min(bytes.len())..];
        if payload.len() < count {
            return Err(Error::PgmTruncated {
                path: path.to_path_buf(),
                expected: count,
                found: payload.len(),
            });
        }
        payload[..count].to_vec()
    } else {
        let mut values = Vec::with_capacity(count);
        while values.len() < count {
            match cursor.next_token() {
                Some(tok) => {
                    // Range-check before narrowing so an oversized sample
                    // errors instead of wrapping.
                    let v = parse_ascii(tok, path, "sample")?;
                    if v > maxval {
                        return Err(format_err(
                            path,
                            &format!("sample value {v} exceeds declared maxval {maxval}"),
                        ));
                    }
                    values.push(v as u8);
                }
                None => {
                    return Err(Error::PgmTruncated {
                        path: path.to_path_buf(),
                        expected: count,
                        found: values.len(),
                    })
                }
            }
        }
        values
    };

    if let Some(&bad) = pixels.iter().find(|&&p| p as usize > maxval) {
        return Err(format_err(
            path,
            &format!("sample value {bad} exceeds declared maxval {maxval}"),
        ));
    }

    GrayImage::new(width, height, pixels)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    /// Next run of non-separator bytes. Leaves `pos` on the byte after the
    /// token so the P5 single-whitespace rule can be applied by the caller.
    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_separators();
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !matches!(self.bytes[self.pos], b' ' | b'\t' | b'\r' | b'\n' | b'#')
        {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn next_number(&mut self, path: &Path, field: &str) -> Result<usize> {
        let tok = self
            .next_token()
            .ok_or_else(|| format_err(path, &format!("missing {field}")))?;
        parse_ascii(tok, path, field)
    }
}

fn parse_ascii(token: &[u8], path: &Path, field: &str) -> Result<usize> {
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| {
            format_err(
                path,
                &format!("invalid {field} token {:?}", String::from_utf8_lossy(token)),
            )
        })
}

fn format_err(path: &Path, detail: &str) -> Error {
    Error::PgmFormat {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    }
}
