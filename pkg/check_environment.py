#!/usr/bin/env python3
"""
Pre-flight check of the environment before running the toolkit
"""

import os
import sys


def check_python_version():
    """Interpreter version"""
    print("=" * 60)
    print("ENVIRONMENT CHECK")
    print("=" * 60)

    version = sys.version_info
    print(f"\n✓ Python Version: {version.major}.{version.minor}.{version.micro}")

    if version.major < 3 or (version.major == 3 and version.minor < 10):
        print("❌ ERROR: Python 3.10 or newer is required (int.bit_count)")
        return False

    return True


def check_required_modules():
    """Third-party packages from requirements.txt"""
    print("\n" + "-" * 60)
    print("CHECKING REQUIRED MODULES")
    print("-" * 60)

    required_modules = [
        'numpy',
        'pandas',
        'scipy',
        'sympy',
        'dotenv',
        'pydantic',
        'pydantic_settings',
        'tqdm',
        'tabulate',
    ]

    missing = []

    for module in required_modules:
        try:
            __import__(module)
            print(f"✓ {module}")
        except ImportError:
            print(f"❌ {module} - NOT INSTALLED")
            missing.append(module)

    if missing:
        print(f"\n❌ Missing modules: {', '.join(missing)}")
        print("\nTo install:")
        print("pip install -r requirements.txt")
        return False

    return True


def check_directory_structure():
    """Package directories and the reports directory"""
    print("\n" + "-" * 60)
    print("CHECKING DIRECTORY STRUCTURE")
    print("-" * 60)

    for dir_path in ['core', 'config', 'tests']:
        if not os.path.isdir(dir_path):
            print(f"❌ {dir_path}/ - missing (run from the repository root)")
            return False
        print(f"✓ {dir_path}/")

    if os.path.isdir('reports'):
        print("✓ reports/")
    else:
        print("⚠️  reports/ - created on first --output or LOG_TO_FILE run")

    return True


def check_settings():
    """Settings load from .env / NRZ_* variables and pass cross-field validation"""
    print("\n" + "-" * 60)
    print("CHECKING SETTINGS")
    print("-" * 60)

    if os.path.exists('.env'):
        print("✓ .env found")
    else:
        print("⚠️  No .env file; defaults and NRZ_* variables are used")

    try:
        from config.settings import Settings

        settings = Settings()
        settings.validate_for_experiments()
        print(f"✓ JOBS={settings.JOBS} EXACT_CUTOFF={settings.EXACT_CUTOFF} "
              f"LOG_BASE={settings.LOG_BASE} CATALOG_HINGE_SCOPE={settings.CATALOG_HINGE_SCOPE}")
    except Exception as e:
        print(f"❌ Settings invalid: {e}")
        return False

    return True


def check_imports():
    """Project modules import cleanly"""
    print("\n" + "-" * 60)
    print("TESTING PROJECT IMPORTS")
    print("-" * 60)

    imports_to_test = [
        ('config.settings', 'Settings'),
        ('core.utils', 'setup_logging'),
        ('core.signed_perm', 'SignedPermutation'),
        ('core.subspaces', 'verdict_diagonal'),
        ('core.ht_odd', 'verdict_odd_element'),
        ('core.cp2_trees', 'rank3_catalog'),
        ('core.g_signature', 'verify_gsignature_cp2'),
        ('core.subgroup_verdicts', 'verdict_group'),
        ('core.analytic', 'alpha_table'),
        ('core.samplers', 'RandomStream'),
        ('core.experiments', 'ExperimentEngine'),
        ('core.cli', 'run'),
    ]

    failed = []

    for module_name, attr in imports_to_test:
        try:
            module = __import__(module_name, fromlist=[attr])
            getattr(module, attr)
            print(f"✓ {module_name}.{attr}")
        except Exception as e:
            print(f"❌ {module_name}.{attr} - {type(e).__name__}: {e}")
            failed.append(module_name)

    if failed:
        print(f"\n❌ Failed imports: {', '.join(failed)}")
        return False

    return True


def main():
    """Run every check"""

    checks = [
        ("Python version", check_python_version),
        ("Required modules", check_required_modules),
        ("Directory structure", check_directory_structure),
        ("Settings", check_settings),
        ("Project imports", check_imports),
    ]

    results = []

    for check_name, check_func in checks:
        try:
            result = check_func()
            results.append((check_name, result))
        except Exception as e:
            print(f"\n❌ ERROR in {check_name}: {e}")
            results.append((check_name, False))

    print("\n" + "=" * 60)
    print("SUMMARY")
    print("=" * 60)

    all_passed = True
    for check_name, result in results:
        status = "✓ PASSED" if result else "❌ FAILED"
        print(f"{status} - {check_name}")
        if not result:
            all_passed = False

    print("\n" + "=" * 60)

    if all_passed:
        print("✅ ENVIRONMENT OK. Try:")
        print("\n   python nielsen_main.py verdict element --cycle-type 3,5,7 --n 15")
    else:
        print("❌ ENVIRONMENT HAS PROBLEMS")
        print("\nSee Documentation/TROUBLESHOOTING.md")

    print("=" * 60 + "\n")

    return all_passed


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
