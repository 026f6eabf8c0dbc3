"""Physical constants and unit conversions (atomic units, hbar = 1)."""

HARTREE_PER_CM1 = 1.0 / 219474.6313632
KB_HARTREE_PER_K = 3.166811563e-6
AU_TIME_FS = 0.02418884
# E [hartree] = NM_HARTREE / wavelength [nm]
NM_HARTREE = 45.56335


def cm1_to_hartree(wavenumber):
    return wavenumber * HARTREE_PER_CM1


def hartree_to_cm1(energy):
    return energy / HARTREE_PER_CM1


def nm_to_hartree(wavelength_nm):
    return NM_HARTREE / wavelength_nm


def hartree_to_nm(energy):
    return NM_HARTREE / energy


def fs_to_au(t_fs):
    return t_fs / AU_TIME_FS


def au_to_fs(t_au):
    return t_au * AU_TIME_FS
