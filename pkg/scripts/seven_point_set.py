"""Build both complexes on the seven-point set and print their differences."""
import json

from randcomplex import betti_numbers, build_complex, meb_radius

POINTS = [(-1, 2), (-2, 0), (0, 0), (2, 3), (0, 3), (1.2, 2.2), (1.5, 1.5)]
RHO = 2.4


def main():
    built = {fl: build_complex(POINTS, RHO, fl).complex for fl in ("RIPS", "CECH")}
    for fl, K in built.items():
        print(f"{fl:5s} f-vector {K.f_vector()}  betti {list(betti_numbers(K))}")
    extra = sorted(set(built["RIPS"].faces) - set(built["CECH"].faces))
    print("faces only in RIPS:", extra)
    for f in extra:
        print(f"  MEB radius of {f}: {meb_radius([POINTS[i] for i in f]):.6g} vs {RHO / 2}")
    print(json.dumps(built["CECH"].to_json()["maximal_faces"]))


if __name__ == "__main__":
    main()
