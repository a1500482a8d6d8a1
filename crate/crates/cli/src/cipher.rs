use std::fs;

use dqmat::dualquat::{read_dqm, write_dqm};
use dqmat::imagecipher::{
    decode_pair, decrypt, encode_pair, encrypt, key_from_images, keygen, read_ppm, ssim, write_ppm, CipherBook,
};
use dqmat::{Error, Result};

use crate::outcome::Outcome;
use crate::CipherCommand;

pub fn cmd_cipher(cmd: &CipherCommand) -> Result<Outcome> {
    match cmd {
        CipherCommand::Keygen {
            rows,
            cols,
            like,
            seed,
            key_images,
            out,
        } => {
            let (n, m) = match (like, rows, cols) {
                (Some(p), _, _) => {
                    let img = read_ppm(p)?;
                    (img.height(), img.width())
                }
                (None, Some(r), Some(c)) => (*r, *c),
                _ => return Err(Error::InvalidArgument("need --rows and --cols, or --like".into())),
            };
            if n == 0 || m == 0 {
                return Err(Error::InvalidArgument(format!("empty plaintext shape {n}x{m}")));
            }
            let (book, mut key) = keygen(n, m, *seed)?;
            if let Some(imgs) = key_images {
                key = key_from_images(&read_ppm(&imgs[0])?, &read_ppm(&imgs[1])?)?;
                if key.shape() != (n, m) {
                    return Err(Error::DimensionMismatch {
                        op: "key images",
                        left: (n, m),
                        right: key.shape(),
                    });
                }
            }
            fs::create_dir_all(out)?;
            book.save(out)?;
            write_dqm(out.join("key.dqm"), &key)?;
            println!("book {n}x{m} (seed {seed}) written to {}", out.display());
            Ok(Outcome::Ok)
        }
        CipherCommand::Encrypt {
            book,
            key,
            img0,
            img1,
            out,
        } => {
            let book = CipherBook::load(book)?;
            let key = read_dqm(key)?;
            let x = encode_pair(&read_ppm(img0)?, &read_ppm(img1)?)?;
            let c = encrypt(&x, &book, &key)?;
            write_dqm(out, &c)?;
            println!("ciphertext {}x{} written to {}", c.rows(), c.cols(), out.display());
            Ok(Outcome::Ok)
        }
        CipherCommand::Decrypt {
            book,
            key,
            ciphertext,
            out0,
            out1,
        } => {
            let book = CipherBook::load(book)?;
            let key = read_dqm(key)?;
            let c = read_dqm(ciphertext)?;
            let dec = decrypt(&c, &book, &key)?;
            let (p0, p1) = decode_pair(&dec.x);
            write_ppm(out0, &p0)?;
            write_ppm(out1, &p1)?;
            println!("residual {:.3e}, domain defect {:.3e}", dec.residual, dec.defect);
            Ok(Outcome::Ok)
        }
        CipherCommand::Ssim { images } => {
            if images.len() % 2 != 0 {
                return Err(Error::InvalidArgument("ssim takes REF TEST pairs".into()));
            }
            for pair in images.chunks(2) {
                let v = ssim(&read_ppm(&pair[0])?, &read_ppm(&pair[1])?)?;
                println!("{} {} ssim {v:.6}", pair[0].display(), pair[1].display());
            }
            Ok(Outcome::Ok)
        }
    }
}
