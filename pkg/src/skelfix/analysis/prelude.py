"""Closed stand-in for the parts of the Java standard library the analysis knows."""

from __future__ import annotations

# class -> (supertype, members). Members use a tiny signature syntax:
#   "[static] Ret name(P1, P2)"   method
#   "[static] Type NAME"          field
#   "(P1, P2)"                    constructor
PRELUDE_CLASSES: dict[str, tuple[str | None, list[str]]] = {
    "Object": (None, [
        "()", "boolean equals(Object)", "int hashCode()", "String toString()",
    ]),
    "String": ("Object", [
        "()", "(String)",
        "int length()", "char charAt(int)", "boolean isEmpty()",
        "boolean equals(Object)", "String substring(int)", "String substring(int, int)",
        "int indexOf(String)", "boolean startsWith(String)", "boolean endsWith(String)",
        "boolean contains(String)", "String trim()", "int compareTo(String)",
        "String toLowerCase()", "String toUpperCase()",
        "static String valueOf(int)",
    ]),
    "StringBuilder": ("Object", [
        "()", "(String)",
        "StringBuilder append(String)", "StringBuilder append(char)", "StringBuilder append(int)",
        "int length()", "char charAt(int)",
    ]),
    "Math": ("Object", [
        "static int abs(int)", "static double abs(double)",
        "static int max(int, int)", "static double max(double, double)",
        "static int min(int, int)", "static double min(double, double)",
        "static double atan2(double, double)", "static double sqrt(double)",
        "static double floor(double)", "static double ceil(double)",
        "static double PI", "static double E",
    ]),
    "Integer": ("Object", [
        "static int parseInt(String)", "static int MAX_VALUE", "static int MIN_VALUE",
    ]),
    "Long": ("Object", ["static long parseLong(String)", "static long MAX_VALUE"]),
    "Double": ("Object", [
        "static double parseDouble(String)", "static boolean isNaN(double)",
        "static double MAX_VALUE",
    ]),
    "Character": ("Object", [
        "static boolean isDigit(char)", "static boolean isWhitespace(char)",
        "static boolean isLetter(char)",
    ]),
    "Throwable": ("Object", ["()", "(String)", "String getMessage()"]),
    "Exception": ("Throwable", ["()", "(String)"]),
    "RuntimeException": ("Exception", ["()", "(String)"]),
    "IllegalArgumentException": ("RuntimeException", ["()", "(String)"]),
    "IllegalStateException": ("RuntimeException", ["()", "(String)"]),
    "NullPointerException": ("RuntimeException", ["()", "(String)"]),
    "ArithmeticException": ("RuntimeException", ["()", "(String)"]),
    "IndexOutOfBoundsException": ("RuntimeException", ["()", "(String)"]),
    "UnsupportedOperationException": ("RuntimeException", ["()", "(String)"]),
}
