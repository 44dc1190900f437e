use crate::crypto::{hardened_digest, verify_timestamp_sig, CipherBlob, HardenedHeader, Sha256Digest};
use crate::runtime::Guid;
use crate::server::{Server, ServerError};
use crate::wire::{AccessRequest, ErrorKind, FetchRequest, HardenedShareUpload, HardenedUpload};

use super::{HardenedShareRecord, HardenedStoredObject};

fn verified_upload(
    header: &HardenedHeader,
    ciphertext: &[u8],
    sha256: &Sha256Digest,
) -> Result<CipherBlob, ServerError> {
    let blob =
        CipherBlob::new(ciphertext.to_vec()).map_err(|e| ServerError::new(ErrorKind::MalformedBlob, e.to_string()))?;
    let actual = hardened_digest(header, &blob);
    if actual != *sha256 {
        return Err(ServerError::new(
            ErrorKind::HashMismatch,
            format!("uploaded hash {sha256} but header and ciphertext hash to {actual}"),
        ));
    }
    Ok(blob)
}

impl Server {
    pub fn handle_hstore(&self, req: &HardenedUpload) -> Result<Guid, ServerError> {
        let ciphertext = verified_upload(&req.header, &req.ciphertext, &req.sha256)?;
        self.commit(|guid| HardenedStoredObject { guid, header: req.header, ciphertext, sha256: req.sha256 })
    }

    pub fn handle_hfetch(&self, req: &FetchRequest) -> Result<(HardenedHeader, CipherBlob), ServerError> {
        let obj = self.store().load::<HardenedStoredObject>(req.guid)?;
        Ok((obj.header, obj.ciphertext))
    }

    /// Stores a client-prepared share. Nothing here needs a password.
    pub fn handle_hshare_upload(&self, req: &HardenedShareUpload) -> Result<Guid, ServerError> {
        let ciphertext = verified_upload(&req.header, &req.ciphertext, &req.sha256)?;
        let created_at = self.now();
        self.commit(|share_guid| HardenedShareRecord {
            share_guid,
            header: req.header,
            ciphertext,
            sha256: req.sha256,
            address: req.address,
            created_at,
        })
    }

    pub fn handle_haccess(&self, req: &AccessRequest) -> Result<(HardenedHeader, CipherBlob), ServerError> {
        let record = self.store().load::<HardenedShareRecord>(req.share_guid)?;
        self.check_fresh(req.timestamp)?;
        if !verify_timestamp_sig(&record.address, req.timestamp, &req.signature) {
            return Err(ServerError::new(ErrorKind::AuthFailed, "signature does not match the share address"));
        }
        Ok((record.header, record.ciphertext))
    }
}
