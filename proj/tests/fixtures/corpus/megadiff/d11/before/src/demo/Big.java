package demo;

public class Big {
    public int huge(int x) {
        int acc = 0;
        acc += compute(x, 0) * weight[0];
        acc += compute(x, 1) * weight[1];
        acc += compute(x, 2) * weight[2];
        acc += compute(x, 3) * weight[3];
        acc += compute(x, 4) * weight[4];
        acc += compute(x, 5) * weight[5];
        acc += compute(x, 6) * weight[6];
        acc += compute(x, 7) * weight[0];
        acc += compute(x, 8) * weight[1];
        acc += compute(x, 9) * weight[2];
        acc += compute(x, 10) * weight[3];
        acc += compute(x, 11) * weight[4];
        acc += compute(x, 12) * weight[5];
        acc += compute(x, 13) * weight[6];
        acc += compute(x, 14) * weight[0];
        acc += compute(x, 15) * weight[1];
        acc += compute(x, 16) * weight[2];
        acc += compute(x, 17) * weight[3];
        acc += compute(x, 18) * weight[4];
        acc += compute(x, 19) * weight[5];
        acc += compute(x, 20) * weight[6];
        acc += compute(x, 21) * weight[0];
        acc += compute(x, 22) * weight[1];
        acc += compute(x, 23) * weight[2];
        acc += compute(x, 24) * weight[3];
        acc += compute(x, 25) * weight[4];
        acc += compute(x, 26) * weight[5];
        acc += compute(x, 27) * weight[6];
        acc += compute(x, 28) * weight[0];
        acc += compute(x, 29) * weight[1];
        acc += compute(x, 30) * weight[2];
        acc += compute(x, 31) * weight[3];
        acc += compute(x, 32) * weight[4];
        acc += compute(x, 33) * weight[5];
        acc += compute(x, 34) * weight[6];
        acc += compute(x, 35) * weight[0];
        acc += compute(x, 36) * weight[1];
        acc += compute(x, 37) * weight[2];
        acc += compute(x, 38) * weight[3];
        acc += compute(x, 39) * weight[4];
        acc += compute(x, 40) * weight[5];
        acc += compute(x, 41) * weight[6];
        acc += compute(x, 42) * weight[0];
        acc += compute(x, 43) * weight[1];
        acc += compute(x, 44) * weight[2];
        acc += compute(x, 45) * weight[3];
        acc += compute(x, 46) * weight[4];
        acc += compute(x, 47) * weight[5];
        acc += compute(x, 48) * weight[6];
        acc += compute(x, 49) * weight[0];
        acc += compute(x, 50) * weight[1];
        acc += compute(x, 51) * weight[2];
        acc += compute(x, 52) * weight[3];
        acc += compute(x, 53) * weight[4];
        acc += compute(x, 54) * weight[5];
        acc += compute(x, 55) * weight[6];
        acc += compute(x, 56) * weight[0];
        acc += compute(x, 57) * weight[1];
        acc += compute(x, 58) * weight[2];
        acc += compute(x, 59) * weight[3];
        acc += compute(x, 60) * weight[4];
        acc += compute(x, 61) * weight[5];
        acc += compute(x, 62) * weight[6];
        acc += compute(x, 63) * weight[0];
        acc += compute(x, 64) * weight[1];
        acc += compute(x, 65) * weight[2];
        acc += compute(x, 66) * weight[3];
        acc += compute(x, 67) * weight[4];
        acc += compute(x, 68) * weight[5];
        acc += compute(x, 69) * weight[6];
        acc += compute(x, 70) * weight[0];
        acc += compute(x, 71) * weight[1];
        acc += compute(x, 72) * weight[2];
        acc += compute(x, 73) * weight[3];
        acc += compute(x, 74) * weight[4];
        acc += compute(x, 75) * weight[5];
        acc += compute(x, 76) * weight[6];
        acc += compute(x, 77) * weight[0];
        acc += compute(x, 78) * weight[1];
        acc += compute(x, 79) * weight[2];
        acc += compute(x, 80) * weight[3];
        acc += compute(x, 81) * weight[4];
        acc += compute(x, 82) * weight[5];
        acc += compute(x, 83) * weight[6];
        acc += compute(x, 84) * weight[0];
        acc += compute(x, 85) * weight[1];
        acc += compute(x, 86) * weight[2];
        acc += compute(x, 87) * weight[3];
        acc += compute(x, 88) * weight[4];
        acc += compute(x, 89) * weight[5];
        acc += compute(x, 90) * weight[6];
        acc += compute(x, 91) * weight[0];
        acc += compute(x, 92) * weight[1];
        acc += compute(x, 93) * weight[2];
        acc += compute(x, 94) * weight[3];
        acc += compute(x, 95) * weight[4];
        acc += compute(x, 96) * weight[5];
        acc += compute(x, 97) * weight[6];
        acc += compute(x, 98) * weight[0];
        acc += compute(x, 99) * weight[1];
        acc += compute(x, 100) * weight[2];
        acc += compute(x, 101) * weight[3];
        acc += compute(x, 102) * weight[4];
        acc += compute(x, 103) * weight[5];
        acc += compute(x, 104) * weight[6];
        acc += compute(x, 105) * weight[0];
        acc += compute(x, 106) * weight[1];
        acc += compute(x, 107) * weight[2];
        acc += compute(x, 108) * weight[3];
        acc += compute(x, 109) * weight[4];
        acc += compute(x, 110) * weight[5];
        acc += compute(x, 111) * weight[6];
        acc += compute(x, 112) * weight[0];
        acc += compute(x, 113) * weight[1];
        acc += compute(x, 114) * weight[2];
        acc += compute(x, 115) * weight[3];
        acc += compute(x, 116) * weight[4];
        acc += compute(x, 117) * weight[5];
        acc += compute(x, 118) * weight[6];
        acc += compute(x, 119) * weight[0];
        acc += compute(x, 120) * weight[1];
        acc += compute(x, 121) * weight[2];
        acc += compute(x, 122) * weight[3];
        acc += compute(x, 123) * weight[4];
        acc += compute(x, 124) * weight[5];
        acc += compute(x, 125) * weight[6];
        acc += compute(x, 126) * weight[0];
        acc += compute(x, 127) * weight[1];
        acc += compute(x, 128) * weight[2];
        acc += compute(x, 129) * weight[3];
        acc += compute(x, 130) * weight[4];
        acc += compute(x, 131) * weight[5];
        acc += compute(x, 132) * weight[6];
        acc += compute(x, 133) * weight[0];
        acc += compute(x, 134) * weight[1];
        acc += compute(x, 135) * weight[2];
        acc += compute(x, 136) * weight[3];
        acc += compute(x, 137) * weight[4];
        acc += compute(x, 138) * weight[5];
        acc += compute(x, 139) * weight[6];
        acc += compute(x, 140) * weight[0];
        acc += compute(x, 141) * weight[1];
        acc += compute(x, 142) * weight[2];
        acc += compute(x, 143) * weight[3];
        acc += compute(x, 144) * weight[4];
        acc += compute(x, 145) * weight[5];
        acc += compute(x, 146) * weight[6];
        acc += compute(x, 147) * weight[0];
        acc += compute(x, 148) * weight[1];
        acc += compute(x, 149) * weight[2];
        acc += compute(x, 150) * weight[3];
        acc += compute(x, 151) * weight[4];
        acc += compute(x, 152) * weight[5];
        acc += compute(x, 153) * weight[6];
        acc += compute(x, 154) * weight[0];
        acc += compute(x, 155) * weight[1];
        acc += compute(x, 156) * weight[2];
        acc += compute(x, 157) * weight[3];
        acc += compute(x, 158) * weight[4];
        acc += compute(x, 159) * weight[5];
        acc += compute(x, 160) * weight[6];
        acc += compute(x, 161) * weight[0];
        acc += compute(x, 162) * weight[1];
        acc += compute(x, 163) * weight[2];
        acc += compute(x, 164) * weight[3];
        acc += compute(x, 165) * weight[4];
        acc += compute(x, 166) * weight[5];
        acc += compute(x, 167) * weight[6];
        acc += compute(x, 168) * weight[0];
        acc += compute(x, 169) * weight[1];
        acc += compute(x, 170) * weight[2];
        acc += compute(x, 171) * weight[3];
        acc += compute(x, 172) * weight[4];
        acc += compute(x, 173) * weight[5];
        acc += compute(x, 174) * weight[6];
        acc += compute(x, 175) * weight[0];
        acc += compute(x, 176) * weight[1];
        acc += compute(x, 177) * weight[2];
        acc += compute(x, 178) * weight[3];
        acc += compute(x, 179) * weight[4];
        acc += compute(x, 180) * weight[5];
        acc += compute(x, 181) * weight[6];
        acc += compute(x, 182) * weight[0];
        acc += compute(x, 183) * weight[1];
        acc += compute(x, 184) * weight[2];
        acc += compute(x, 185) * weight[3];
        acc += compute(x, 186) * weight[4];
        acc += compute(x, 187) * weight[5];
        acc += compute(x, 188) * weight[6];
        acc += compute(x, 189) * weight[0];
        acc += compute(x, 190) * weight[1];
        acc += compute(x, 191) * weight[2];
        acc += compute(x, 192) * weight[3];
        acc += compute(x, 193) * weight[4];
        acc += compute(x, 194) * weight[5];
        acc += compute(x, 195) * weight[6];
        acc += compute(x, 196) * weight[0];
        acc += compute(x, 197) * weight[1];
        acc += compute(x, 198) * weight[2];
        acc += compute(x, 199) * weight[3];
        return acc;
    }
}
