"""Strict representatives for the two bundled group actions."""

from ainfty.groups import strictify_free
from ainfty.scenarios import load_bundled


def show(title, res):
    print(title)
    print("  F_e = id:", res["identity"])
    for key, ok in sorted(res["table"].items()):
        print(f"  {key}: {'EQUAL' if ok else 'DIFFERENT'}")


def main():
    sc = load_bundled("z2_scenario").actions["swap"].scenario
    res = sc.strictify()
    Fg = res["representatives"]["g1"]
    print("Z/2: swap preserves alpha1:", sc.action.preserves(sc.algebra(1)),
          " alpha0:", sc.action.preserves(sc.algebra(0)))
    print("Z/2: F_g has higher components:",
          [n for n in (2, 3) if not Fg.component(n).is_zero()])
    show("Z/2 table (g, h)", res)

    model = load_bundled("free2_scenario").actions["loops"].model
    show("free group table (g, h, gh)", strictify_free(model))


if __name__ == "__main__":
    main()
