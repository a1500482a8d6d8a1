//! Two color images in one dual quaternion matrix `X`, encrypted as
//! `C = A X - Y B` with a fixed book `(A, B)` and a secret key `Y`.

mod cipher;
mod image;
mod ssim;

pub use cipher::{
    condition_number, decode_image, decode_pair, decrypt, decrypt_raw, encode_image, encode_pair, encrypt,
    key_from_images, keygen, plaintext_defect, CipherBook, Decryption, DOMAIN_TOL, KEYGEN_RETRIES, MANIFEST_TAG,
    MAX_CONDITION,
};
pub use image::{read_ppm, write_ppm, ColorImage};
pub use ssim::{ssim, WINDOW};
